//! Thresholds for the exhaustive checks. Everything in this crate is
//! brute force; these caps decide when the expensive uniqueness searches
//! and family enumerations are run in full.

/// Caps for exhaustive verification. All checks below the cap run in
/// full; above it they are skipped and the skip is reported by the
/// operation that owns them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    /// Morphism-count threshold below which uniqueness assertions
    /// (terminality, diagonal fillers, lifted structures) are verified
    /// by exhaustive search. Default 200.
    pub exhaustive_cap: usize,
    /// Morphism-count bound for `enumerate_range_operators`. Default 20.
    pub range_enum_cap: usize,
    /// Hom-set size up to which every subset is enumerated as a
    /// candidate compatible family. Default 12.
    pub family_full_hom_cap: usize,
    /// For homs above `family_full_hom_cap`, families up to this size
    /// (plus the full hom) are enumerated instead. Default 3.
    pub family_small_size: usize,
    /// Total-morphism bound accepted by the builders. Default 300.
    pub morphism_bound: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            exhaustive_cap: 200,
            range_enum_cap: 20,
            family_full_hom_cap: 12,
            family_small_size: 3,
            morphism_bound: 300,
        }
    }
}

impl CheckConfig {
    /// Default config with caps overridden from the environment:
    /// `RESCAT_EXHAUSTIVE_CAP`, `RESCAT_RANGE_ENUM_CAP`,
    /// `RESCAT_FAMILY_HOM_CAP`, `RESCAT_MORPHISM_BOUND`.
    pub fn from_env() -> Self {
        fn var(name: &str, dflt: usize) -> usize {
            std::env::var(name).ok().and_then(|v| v.parse().ok()).unwrap_or(dflt)
        }
        let d = CheckConfig::default();
        CheckConfig {
            exhaustive_cap: var("RESCAT_EXHAUSTIVE_CAP", d.exhaustive_cap),
            range_enum_cap: var("RESCAT_RANGE_ENUM_CAP", d.range_enum_cap),
            family_full_hom_cap: var("RESCAT_FAMILY_HOM_CAP", d.family_full_hom_cap),
            family_small_size: d.family_small_size,
            morphism_bound: var("RESCAT_MORPHISM_BOUND", d.morphism_bound),
        }
    }
}
