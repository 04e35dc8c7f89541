//! Canonical text serialization for every domain object, as a
//! constrained, documented subset of TOML.
//!
//! Canonical form rules (serialize is a pure function of the value, so
//! `serialize(parse(serialize(x))) == serialize(x)` byte for byte):
//!
//! - UTF-8, `\n` line endings, no blank lines, two-space indent inside
//!   multiline arrays;
//! - `format_version` first, then `kind`, then the kind's tables in a
//!   fixed documented order; keys inside each table are alphabetical;
//! - ids are dense integers from 0; there is no floating point anywhere;
//! - arrays of scalars are printed inline; arrays of arrays are printed
//!   one row per line unless they have at most one row;
//! - optional fields (labels, hom order, overrides) are omitted when
//!   empty -- absence *is* the explicit encoding of "none", there are no
//!   implicit defaults;
//! - unknown keys and unknown `format_version`s are rejected.
//!
//! Document kinds: `category`, `restriction`, `join`, `range`,
//! `functor`, `transformation`, `semilattice`, `stable_map`, `report`.
//! The `functor` and `stable_map` kinds carry one *or more* named items
//! over a shared pool (a diagonal-filler square file is a functor
//! document with items named `top`, `left`, `bottom`, `right`; a
//! Beck-Chevalley square file is a stable_map document with items named
//! `h`, `f`, `g`, `k`).

use crate::cat::{FinCat, FinFunctor, MorId, ObjId};
use crate::join::JoinStructure;
use crate::range::RangeStructure;
use crate::report::{AxiomReport, Failure, ValidationReport};
use crate::restriction::RestrictionCat;
use crate::semilattice::MeetSemilattice;
use crate::{Error, Result};

pub const FORMAT_VERSION: i64 = 1;

/// A plain category payload, optionally carrying an explicit hom order
/// (used as the source of a `lift` problem).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryDoc {
    pub cat: FinCat,
    /// Strict order pairs `(f, g)` meaning `f ⩽ g`, `f ≠ g`.
    pub order: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PoolEntry {
    Category(CategoryDoc),
    Restriction(RestrictionCat),
}

impl PoolEntry {
    pub fn base(&self) -> &FinCat {
        match self {
            PoolEntry::Category(c) => &c.cat,
            PoolEntry::Restriction(rc) => &rc.base,
        }
    }

    pub fn restriction(&self) -> Result<&RestrictionCat> {
        match self {
            PoolEntry::Restriction(rc) => Ok(rc),
            PoolEntry::Category(_) => {
                Err(Error::Structural("pool entry carries no restriction structure".into()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFunctor {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub object_map: Vec<usize>,
    pub morphism_map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorDoc {
    pub pool: Vec<PoolEntry>,
    pub functors: Vec<NamedFunctor>,
}

impl FunctorDoc {
    /// Materialises functor `i` with owned endpoint categories.
    pub fn functor(&self, i: usize) -> Result<FinFunctor> {
        let nf = self
            .functors
            .get(i)
            .ok_or_else(|| Error::Structural(format!("no functor at index {i}")))?;
        let src = self
            .pool
            .get(nf.source)
            .ok_or_else(|| Error::Structural("functor source outside pool".into()))?;
        let tgt = self
            .pool
            .get(nf.target)
            .ok_or_else(|| Error::Structural("functor target outside pool".into()))?;
        FinFunctor::new(
            src.base().clone(),
            tgt.base().clone(),
            nf.object_map.iter().map(|&o| ObjId(o)).collect(),
            nf.morphism_map.iter().map(|&m| MorId(m)).collect(),
        )
    }

    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.functors.iter().position(|f| f.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationDoc {
    pub doc: FunctorDoc,
    pub source: usize,
    pub target: usize,
    pub components: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedStableMap {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableMapDoc {
    pub lattices: Vec<MeetSemilattice>,
    pub maps: Vec<NamedStableMap>,
}

impl StableMapDoc {
    pub fn stable_map(&self, i: usize) -> Result<crate::semilattice::StableMap> {
        let nm = self
            .maps
            .get(i)
            .ok_or_else(|| Error::Structural(format!("no stable map at index {i}")))?;
        let src = self
            .lattices
            .get(nm.source)
            .ok_or_else(|| Error::Structural("stable map source outside pool".into()))?;
        let tgt = self
            .lattices
            .get(nm.target)
            .ok_or_else(|| Error::Structural("stable map target outside pool".into()))?;
        crate::semilattice::StableMap::new(src.clone(), tgt.clone(), nm.map.clone())
    }

    pub fn by_name(&self, name: &str) -> Option<usize> {
        self.maps.iter().position(|m| m.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportDoc {
    pub subject: String,
    pub ok: bool,
    pub failures: Vec<Failure>,
}

impl ReportDoc {
    pub fn from_validation(subject: impl Into<String>, rep: &ValidationReport) -> ReportDoc {
        ReportDoc { subject: subject.into(), ok: rep.ok(), failures: rep.failures.clone() }
    }

    pub fn from_axioms(subject: impl Into<String>, rep: &AxiomReport) -> ReportDoc {
        ReportDoc {
            subject: subject.into(),
            ok: rep.ok(),
            failures: rep
                .axioms
                .iter()
                .filter(|a| !a.ok)
                .map(|a| {
                    Failure::new(
                        a.axiom.clone(),
                        a.witness.clone().unwrap_or_default(),
                        a.note.clone(),
                    )
                })
                .collect(),
        }
    }
}

/// One parsed or to-be-serialized document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Category(CategoryDoc),
    Restriction(RestrictionCat),
    Join(JoinStructure),
    Range(RangeStructure),
    Functor(FunctorDoc),
    Transformation(TransformationDoc),
    Semilattice(MeetSemilattice),
    StableMap(StableMapDoc),
    Report(ReportDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Category(_) => "category",
            Document::Restriction(_) => "restriction",
            Document::Join(_) => "join",
            Document::Range(_) => "range",
            Document::Functor(_) => "functor",
            Document::Transformation(_) => "transformation",
            Document::Semilattice(_) => "semilattice",
            Document::StableMap(_) => "stable_map",
            Document::Report(_) => "report",
        }
    }

    /// The restriction host of a restriction/join/range document.
    pub fn as_restriction(&self) -> Result<&RestrictionCat> {
        match self {
            Document::Restriction(rc) => Ok(rc),
            Document::Join(js) => Ok(&js.host),
            Document::Range(rs) => Ok(&rs.host),
            other => Err(Error::Structural(format!(
                "expected a restriction-bearing document, got kind {}",
                other.kind()
            ))),
        }
    }

    /// A join view: join documents keep their overrides, plain
    /// restriction (and range) documents get the search-based joins.
    pub fn as_join(&self) -> Result<JoinStructure> {
        match self {
            Document::Join(js) => Ok(js.clone()),
            Document::Restriction(rc) => Ok(JoinStructure::new(rc.clone())),
            Document::Range(rs) => Ok(JoinStructure::new(rs.host.clone())),
            other => Err(Error::Structural(format!(
                "expected a join-bearing document, got kind {}",
                other.kind()
            ))),
        }
    }

    pub fn as_range(&self) -> Result<&RangeStructure> {
        match self {
            Document::Range(rs) => Ok(rs),
            other => Err(Error::Structural(format!(
                "expected a range document, got kind {}",
                other.kind()
            ))),
        }
    }
}

// ---------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------

struct Writer {
    out: String,
}

impl Writer {
    fn new() -> Writer {
        Writer { out: String::new() }
    }

    fn line(&mut self, s: &str) {
        self.out.push_str(s);
        self.out.push('\n');
    }

    fn kv_int(&mut self, k: &str, v: i64) {
        self.line(&format!("{k} = {v}"));
    }

    fn kv_bool(&mut self, k: &str, v: bool) {
        self.line(&format!("{k} = {v}"));
    }

    fn kv_str(&mut self, k: &str, v: &str) {
        self.line(&format!("{k} = {}", toml_str(v)));
    }

    fn kv_ints(&mut self, k: &str, vs: impl Iterator<Item = usize>) {
        let body: Vec<String> = vs.map(|v| v.to_string()).collect();
        self.line(&format!("{k} = [{}]", body.join(", ")));
    }

    fn kv_strs(&mut self, k: &str, vs: &[String]) {
        let body: Vec<String> = vs.iter().map(|v| toml_str(v)).collect();
        self.line(&format!("{k} = [{}]", body.join(", ")));
    }

    /// Array of integer rows: inline when at most one row, one row per
    /// line otherwise.
    fn kv_rows(&mut self, k: &str, rows: &[Vec<usize>]) {
        let fmt_row = |r: &Vec<usize>| {
            format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
        };
        if rows.len() <= 1 {
            let body: Vec<String> = rows.iter().map(fmt_row).collect();
            self.line(&format!("{k} = [{}]", body.join(", ")));
        } else {
            self.line(&format!("{k} = ["));
            for r in rows {
                self.line(&format!("  {},", fmt_row(r)));
            }
            self.line("]");
        }
    }
}

fn toml_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_category_block(
    w: &mut Writer,
    table: &str,
    c: &FinCat,
    order: Option<&[(usize, usize)]>,
) {
    w.line(&format!("[{table}]"));
    w.kv_ints("cod", c.morphisms().map(|m| c.cod(m).0));
    let rows: Vec<Vec<usize>> =
        c.compose_entries().iter().map(|&(g, f, h)| vec![g.0, f.0, h.0]).collect();
    w.kv_rows("compose", &rows);
    w.kv_ints("dom", c.morphisms().map(|m| c.dom(m).0));
    w.kv_ints("identity", c.objects().map(|a| c.identity(a).0));
    if !c.label.is_empty() {
        w.kv_str("label", &c.label);
    }
    if !c.mor_labels.is_empty() {
        w.kv_strs("morphism_labels", &c.mor_labels);
    }
    if !c.obj_labels.is_empty() {
        w.kv_strs("object_labels", &c.obj_labels);
    }
    w.kv_int("objects", c.n_objects() as i64);
    if let Some(pairs) = order {
        if !pairs.is_empty() {
            let mut rows: Vec<Vec<usize>> = pairs.iter().map(|&(f, g)| vec![f, g]).collect();
            rows.sort();
            w.kv_rows("order", &rows);
        }
    }
}

fn write_restriction_block(w: &mut Writer, table: &str, rc: &RestrictionCat) {
    w.line(&format!("[{table}]"));
    w.kv_ints("bar", rc.bar_table().iter().map(|m| m.0));
}

fn write_pool(w: &mut Writer, pool: &[PoolEntry]) {
    for entry in pool {
        w.line("[[pool]]");
        match entry {
            PoolEntry::Category(cd) => {
                w.kv_str("kind", "category");
                write_category_block(w, "pool.category", &cd.cat, Some(&cd.order));
            }
            PoolEntry::Restriction(rc) => {
                w.kv_str("kind", "restriction");
                write_category_block(w, "pool.category", &rc.base, None);
                write_restriction_block(w, "pool.restriction", rc);
            }
        }
    }
}

fn write_functors(w: &mut Writer, functors: &[NamedFunctor]) {
    for f in functors {
        w.line("[[functor]]");
        w.kv_ints("morphism_map", f.morphism_map.iter().copied());
        w.kv_str("name", &f.name);
        w.kv_ints("object_map", f.object_map.iter().copied());
        w.kv_int("source", f.source as i64);
        w.kv_int("target", f.target as i64);
    }
}

fn write_semilattice_body(w: &mut Writer, l: &MeetSemilattice) {
    w.kv_int("elements", l.size() as i64);
    if !l.labels.is_empty() {
        w.kv_strs("labels", &l.labels);
    }
    let n = l.size();
    let leq_rows: Vec<Vec<usize>> =
        (0..n).map(|a| (0..n).map(|b| usize::from(l.le(a, b))).collect()).collect();
    w.kv_rows("leq", &leq_rows);
    let meet_rows: Vec<Vec<usize>> =
        (0..n).map(|a| (0..n).map(|b| l.meet(a, b)).collect()).collect();
    w.kv_rows("meet", &meet_rows);
    w.kv_int("top", l.top() as i64);
}

/// Serializes a document to its canonical text.
pub fn serialize(doc: &Document) -> String {
    let mut w = Writer::new();
    w.kv_int("format_version", FORMAT_VERSION);
    w.kv_str("kind", doc.kind());
    match doc {
        Document::Category(cd) => {
            write_category_block(&mut w, "category", &cd.cat, Some(&cd.order));
        }
        Document::Restriction(rc) => {
            write_category_block(&mut w, "category", &rc.base, None);
            write_restriction_block(&mut w, "restriction", rc);
        }
        Document::Join(js) => {
            write_category_block(&mut w, "category", &js.host.base, None);
            write_restriction_block(&mut w, "restriction", &js.host);
            let mut ovs: Vec<(ObjId, ObjId, Vec<MorId>, MorId)> = js.overrides().collect();
            ovs.sort();
            for (a, b, fam, j) in ovs {
                w.line("[[join_override]]");
                w.kv_int("cod", b.0 as i64);
                w.kv_int("dom", a.0 as i64);
                w.kv_ints("family", fam.iter().map(|m| m.0));
                w.kv_int("join", j.0 as i64);
            }
        }
        Document::Range(rs) => {
            write_category_block(&mut w, "category", &rs.host.base, None);
            write_restriction_block(&mut w, "restriction", &rs.host);
            w.line("[range]");
            w.kv_ints("hat", rs.hat_table().iter().map(|m| m.0));
        }
        Document::Functor(fd) => {
            write_functors(&mut w, &fd.functors);
            write_pool(&mut w, &fd.pool);
        }
        Document::Transformation(td) => {
            w.line("[transformation]");
            w.kv_ints("components", td.components.iter().copied());
            w.kv_int("source", td.source as i64);
            w.kv_int("target", td.target as i64);
            write_functors(&mut w, &td.doc.functors);
            write_pool(&mut w, &td.doc.pool);
        }
        Document::Semilattice(l) => {
            w.line("[semilattice]");
            write_semilattice_body(&mut w, l);
        }
        Document::StableMap(sd) => {
            for m in &sd.maps {
                w.line("[[stable_map]]");
                w.kv_ints("map", m.map.iter().copied());
                w.kv_str("name", &m.name);
                w.kv_int("source", m.source as i64);
                w.kv_int("target", m.target as i64);
            }
            for l in &sd.lattices {
                w.line("[[lattice]]");
                write_semilattice_body(&mut w, l);
            }
        }
        Document::Report(rd) => {
            w.line("[report]");
            w.kv_bool("ok", rd.ok);
            w.kv_str("subject", &rd.subject);
            for f in &rd.failures {
                w.line("[[report_failure]]");
                w.kv_str("law", &f.law);
                w.kv_str("note", &f.note);
                w.kv_ints("witness", f.witness.iter().copied());
            }
        }
    }
    w.out
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

use toml::Value;

struct Keys<'a> {
    table: &'a toml::map::Map<String, Value>,
    path: String,
}

impl<'a> Keys<'a> {
    fn new(table: &'a toml::map::Map<String, Value>, path: &str) -> Keys<'a> {
        Keys { table, path: path.to_string() }
    }

    fn err(&self, msg: String) -> Error {
        let at = if self.path.is_empty() { "document" } else { &self.path };
        Error::Structural(format!("{at}: {msg}"))
    }

    fn expect_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.table.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(self.err(format!("unknown key `{k}` (expected one of {allowed:?})")));
            }
        }
        Ok(())
    }

    fn get(&self, k: &str) -> Result<&'a Value> {
        self.table.get(k).ok_or_else(|| self.err(format!("missing key `{k}`")))
    }

    fn opt(&self, k: &str) -> Option<&'a Value> {
        self.table.get(k)
    }

    fn int(&self, k: &str) -> Result<i64> {
        self.get(k)?
            .as_integer()
            .ok_or_else(|| self.err(format!("key `{k}` must be an integer")))
    }

    fn usize(&self, k: &str) -> Result<usize> {
        let v = self.int(k)?;
        usize::try_from(v).map_err(|_| self.err(format!("key `{k}` must be non-negative")))
    }

    fn string(&self, k: &str) -> Result<String> {
        Ok(self
            .get(k)?
            .as_str()
            .ok_or_else(|| self.err(format!("key `{k}` must be a string")))?
            .to_string())
    }

    fn bool(&self, k: &str) -> Result<bool> {
        self.get(k)?.as_bool().ok_or_else(|| self.err(format!("key `{k}` must be a boolean")))
    }

    fn ints(&self, k: &str) -> Result<Vec<usize>> {
        value_ints(self.get(k)?, &format!("{}.{k}", self.path))
    }

    fn opt_ints(&self, k: &str) -> Result<Vec<usize>> {
        match self.opt(k) {
            Some(v) => value_ints(v, &format!("{}.{k}", self.path)),
            None => Ok(Vec::new()),
        }
    }

    fn opt_strings(&self, k: &str) -> Result<Vec<String>> {
        match self.opt(k) {
            None => Ok(Vec::new()),
            Some(v) => v
                .as_array()
                .ok_or_else(|| self.err(format!("key `{k}` must be an array of strings")))?
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| self.err(format!("key `{k}` must contain strings")))
                })
                .collect(),
        }
    }

    fn rows(&self, k: &str) -> Result<Vec<Vec<usize>>> {
        let arr = self
            .get(k)?
            .as_array()
            .ok_or_else(|| self.err(format!("key `{k}` must be an array of integer arrays")))?;
        arr.iter().map(|v| value_ints(v, &format!("{}.{k}", self.path))).collect()
    }

    fn opt_rows(&self, k: &str) -> Result<Vec<Vec<usize>>> {
        match self.opt(k) {
            None => Ok(Vec::new()),
            Some(_) => self.rows(k),
        }
    }

    fn table(&self, k: &str) -> Result<Keys<'a>> {
        let t = self
            .get(k)?
            .as_table()
            .ok_or_else(|| self.err(format!("key `{k}` must be a table")))?;
        Ok(Keys::new(t, &format!("{}.{k}", self.path)))
    }

    fn opt_array_of_tables(&self, k: &str) -> Result<Vec<Keys<'a>>> {
        match self.opt(k) {
            None => Ok(Vec::new()),
            Some(v) => {
                let arr = v
                    .as_array()
                    .ok_or_else(|| self.err(format!("key `{k}` must be an array of tables")))?;
                arr.iter()
                    .enumerate()
                    .map(|(i, x)| {
                        x.as_table()
                            .map(|t| Keys::new(t, &format!("{}.{k}[{i}]", self.path)))
                            .ok_or_else(|| self.err(format!("key `{k}` must contain tables")))
                    })
                    .collect()
            }
        }
    }
}

fn value_ints(v: &Value, path: &str) -> Result<Vec<usize>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Structural(format!("{path}: expected an integer array")))?;
    arr.iter()
        .map(|x| {
            x.as_integer().and_then(|i| usize::try_from(i).ok()).ok_or_else(|| {
                Error::Structural(format!("{path}: expected non-negative integers"))
            })
        })
        .collect()
}

fn parse_category_block(k: &Keys, with_order: bool) -> Result<CategoryDoc> {
    let mut allowed = vec![
        "cod",
        "compose",
        "dom",
        "identity",
        "label",
        "morphism_labels",
        "object_labels",
        "objects",
    ];
    if with_order {
        allowed.push("order");
    }
    k.expect_keys(&allowed)?;
    let objects = k.usize("objects")?;
    let dom: Vec<ObjId> = k.ints("dom")?.into_iter().map(ObjId).collect();
    let cod: Vec<ObjId> = k.ints("cod")?.into_iter().map(ObjId).collect();
    let identity: Vec<MorId> = k.ints("identity")?.into_iter().map(MorId).collect();
    let entries: Vec<(MorId, MorId, MorId)> = k
        .rows("compose")?
        .into_iter()
        .map(|r| {
            if r.len() != 3 {
                Err(k.err("compose rows must be [g, f, h] triples".into()))
            } else {
                Ok((MorId(r[0]), MorId(r[1]), MorId(r[2])))
            }
        })
        .collect::<Result<_>>()?;
    let mut cat = FinCat::new(objects, dom, cod, identity, &entries)?;
    if let Some(v) = k.opt("label") {
        cat.label =
            v.as_str().ok_or_else(|| k.err("label must be a string".into()))?.to_string();
    }
    cat.mor_labels = k.opt_strings("morphism_labels")?;
    cat.obj_labels = k.opt_strings("object_labels")?;
    if !cat.mor_labels.is_empty() && cat.mor_labels.len() != cat.n_morphisms() {
        return Err(k.err("morphism_labels must cover every morphism".into()));
    }
    if !cat.obj_labels.is_empty() && cat.obj_labels.len() != cat.n_objects() {
        return Err(k.err("object_labels must cover every object".into()));
    }
    let order: Vec<(usize, usize)> = k
        .opt_rows("order")?
        .into_iter()
        .map(|r| {
            if r.len() != 2 {
                Err(k.err("order rows must be [f, g] pairs".into()))
            } else {
                Ok((r[0], r[1]))
            }
        })
        .collect::<Result<_>>()?;
    Ok(CategoryDoc { cat, order })
}

fn parse_restriction(top: &Keys) -> Result<RestrictionCat> {
    let cd = parse_category_block(&top.table("category")?, false)?;
    let rk = top.table("restriction")?;
    rk.expect_keys(&["bar"])?;
    let bar: Vec<MorId> = rk.ints("bar")?.into_iter().map(MorId).collect();
    RestrictionCat::new(cd.cat, bar)
}

fn parse_pool(top: &Keys) -> Result<Vec<PoolEntry>> {
    top.opt_array_of_tables("pool")?
        .into_iter()
        .map(|p| {
            p.expect_keys(&["kind", "category", "restriction"])?;
            match p.string("kind")?.as_str() {
                "category" => {
                    Ok(PoolEntry::Category(parse_category_block(&p.table("category")?, true)?))
                }
                "restriction" => Ok(PoolEntry::Restriction(parse_restriction(&p)?)),
                other => Err(p.err(format!("unknown pool kind `{other}`"))),
            }
        })
        .collect()
}

fn parse_functors(top: &Keys) -> Result<Vec<NamedFunctor>> {
    top.opt_array_of_tables("functor")?
        .into_iter()
        .map(|f| {
            f.expect_keys(&["morphism_map", "name", "object_map", "source", "target"])?;
            Ok(NamedFunctor {
                name: f.string("name")?,
                source: f.usize("source")?,
                target: f.usize("target")?,
                object_map: f.ints("object_map")?,
                morphism_map: f.ints("morphism_map")?,
            })
        })
        .collect()
}

fn parse_semilattice_block(k: &Keys) -> Result<MeetSemilattice> {
    k.expect_keys(&["elements", "labels", "leq", "meet", "top"])?;
    let n = k.usize("elements")?;
    let leq_rows = k.rows("leq")?;
    let meet_rows = k.rows("meet")?;
    if leq_rows.len() != n || meet_rows.len() != n {
        return Err(k.err("leq/meet must have one row per element".into()));
    }
    let mut leq = Vec::with_capacity(n * n);
    let mut meet = Vec::with_capacity(n * n);
    for (r, m) in leq_rows.iter().zip(&meet_rows) {
        if r.len() != n || m.len() != n {
            return Err(k.err("leq/meet rows must have one entry per element".into()));
        }
        for &x in r {
            if x > 1 {
                return Err(k.err("leq entries must be 0 or 1".into()));
            }
            leq.push(x == 1);
        }
        meet.extend(m.iter().copied());
    }
    let mut l = MeetSemilattice::from_tables(n, leq, k.usize("top")?, meet)?;
    l.labels = k.opt_strings("labels")?;
    if !l.labels.is_empty() && l.labels.len() != n {
        return Err(k.err("labels must cover every element".into()));
    }
    Ok(l)
}

/// Parses a canonical document. Syntax errors carry the line/column
/// reported by the TOML parser; shape errors carry the key path.
pub fn parse(text: &str) -> Result<Document> {
    let table: toml::Table = toml::from_str(text).map_err(|e| {
        let (line, col) =
            e.span().map(|s| offset_to_line_col(text, s.start)).unwrap_or((0, 0));
        Error::Parse { line, col, msg: e.message().to_string() }
    })?;
    let top = Keys::new(&table, "");
    let version = top.int("format_version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Structural(format!(
            "unknown format_version {version} (expected {FORMAT_VERSION})"
        )));
    }
    let kind = top.string("kind")?;
    match kind.as_str() {
        "category" => {
            top.expect_keys(&["format_version", "kind", "category"])?;
            Ok(Document::Category(parse_category_block(&top.table("category")?, true)?))
        }
        "restriction" => {
            top.expect_keys(&["format_version", "kind", "category", "restriction"])?;
            Ok(Document::Restriction(parse_restriction(&top)?))
        }
        "join" => {
            top.expect_keys(&[
                "format_version",
                "kind",
                "category",
                "restriction",
                "join_override",
            ])?;
            let host = parse_restriction(&top)?;
            let overrides = top
                .opt_array_of_tables("join_override")?
                .into_iter()
                .map(|o| {
                    o.expect_keys(&["cod", "dom", "family", "join"])?;
                    Ok((
                        ObjId(o.usize("dom")?),
                        ObjId(o.usize("cod")?),
                        o.ints("family")?.into_iter().map(MorId).collect::<Vec<_>>(),
                        MorId(o.usize("join")?),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Document::Join(JoinStructure::with_overrides(host, overrides)))
        }
        "range" => {
            top.expect_keys(&["format_version", "kind", "category", "restriction", "range"])?;
            let host = parse_restriction(&top)?;
            let rk = top.table("range")?;
            rk.expect_keys(&["hat"])?;
            let hat: Vec<MorId> = rk.ints("hat")?.into_iter().map(MorId).collect();
            Ok(Document::Range(RangeStructure::new(host, hat)?))
        }
        "functor" => {
            top.expect_keys(&["format_version", "kind", "functor", "pool"])?;
            let doc = FunctorDoc { pool: parse_pool(&top)?, functors: parse_functors(&top)? };
            for i in 0..doc.functors.len() {
                doc.functor(i)?;
            }
            Ok(Document::Functor(doc))
        }
        "transformation" => {
            top.expect_keys(&["format_version", "kind", "transformation", "functor", "pool"])?;
            let tk = top.table("transformation")?;
            tk.expect_keys(&["components", "source", "target"])?;
            let doc = FunctorDoc { pool: parse_pool(&top)?, functors: parse_functors(&top)? };
            let td = TransformationDoc {
                source: tk.usize("source")?,
                target: tk.usize("target")?,
                components: tk.ints("components")?,
                doc,
            };
            td.doc.functor(td.source)?;
            td.doc.functor(td.target)?;
            Ok(Document::Transformation(td))
        }
        "semilattice" => {
            top.expect_keys(&["format_version", "kind", "semilattice"])?;
            Ok(Document::Semilattice(parse_semilattice_block(&top.table("semilattice")?)?))
        }
        "stable_map" => {
            top.expect_keys(&["format_version", "kind", "stable_map", "lattice"])?;
            let lattices = top
                .opt_array_of_tables("lattice")?
                .into_iter()
                .map(|l| parse_semilattice_block(&l))
                .collect::<Result<Vec<_>>>()?;
            let maps = top
                .opt_array_of_tables("stable_map")?
                .into_iter()
                .map(|m| {
                    m.expect_keys(&["map", "name", "source", "target"])?;
                    Ok(NamedStableMap {
                        name: m.string("name")?,
                        source: m.usize("source")?,
                        target: m.usize("target")?,
                        map: m.ints("map")?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let doc = StableMapDoc { lattices, maps };
            for i in 0..doc.maps.len() {
                doc.stable_map(i)?;
            }
            Ok(Document::StableMap(doc))
        }
        "report" => {
            top.expect_keys(&["format_version", "kind", "report", "report_failure"])?;
            let rk = top.table("report")?;
            rk.expect_keys(&["ok", "subject"])?;
            let failures = top
                .opt_array_of_tables("report_failure")?
                .into_iter()
                .map(|f| {
                    f.expect_keys(&["law", "note", "witness"])?;
                    Ok(Failure {
                        law: f.string("law")?,
                        note: f.string("note")?,
                        witness: f.opt_ints("witness")?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Document::Report(ReportDoc {
                subject: rk.string("subject")?,
                ok: rk.bool("ok")?,
                failures,
            }))
        }
        other => Err(Error::Structural(format!("unknown document kind `{other}`"))),
    }
}

fn offset_to_line_col(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

/// Builds a functor document from in-memory functors over restriction
/// hosts, deduplicating pool entries by value.
pub fn functor_document(
    items: &[(&str, &FinFunctor, &RestrictionCat, &RestrictionCat)],
) -> FunctorDoc {
    let mut pool: Vec<PoolEntry> = Vec::new();
    let index_of = |rc: &RestrictionCat, pool: &mut Vec<PoolEntry>| -> usize {
        if let Some(i) =
            pool.iter().position(|p| matches!(p, PoolEntry::Restriction(r) if r == rc))
        {
            return i;
        }
        pool.push(PoolEntry::Restriction(rc.clone()));
        pool.len() - 1
    };
    let mut functors = Vec::new();
    for (name, f, src, tgt) in items {
        let source = index_of(src, &mut pool);
        let target = index_of(tgt, &mut pool);
        functors.push(NamedFunctor {
            name: name.to_string(),
            source,
            target,
            object_map: f.obj_map.iter().map(|o| o.0).collect(),
            morphism_map: f.mor_map.iter().map(|m| m.0).collect(),
        });
    }
    FunctorDoc { pool, functors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::CheckConfig;

    fn point_trivial() -> RestrictionCat {
        let c = FinCat::new(
            1,
            vec![ObjId(0)],
            vec![ObjId(0)],
            vec![MorId(0)],
            &[(MorId(0), MorId(0), MorId(0))],
        )
        .unwrap();
        builders::build_trivial(&c).unwrap()
    }

    #[test]
    fn golden_trivial_point() {
        let doc = Document::Restriction(point_trivial());
        let text = serialize(&doc);
        let expected = "\
format_version = 1
kind = \"restriction\"
[category]
cod = [0]
compose = [[0, 0, 0]]
dom = [0]
identity = [0]
objects = 1
[restriction]
bar = [0]
";
        assert_eq!(text, expected);
        assert_eq!(text.lines().count(), 10);
    }

    #[test]
    fn round_trip_builder_outputs() {
        let cfg = CheckConfig::default();
        let sp = builders::build_set_p(&[1, 2], &cfg).unwrap();
        let docs = vec![
            Document::Restriction(sp.rc.clone()),
            Document::Join(sp.join.clone()),
            Document::Range(sp.range.clone()),
            Document::Semilattice(crate::semilattice::MeetSemilattice::powerset(2)),
        ];
        for doc in docs {
            let text = serialize(&doc);
            let parsed = parse(&text).unwrap();
            assert_eq!(parsed, doc);
            assert_eq!(serialize(&parsed), text);
        }
    }

    #[test]
    fn round_trip_functor_and_transformation() {
        let cfg = CheckConfig::default();
        let (triv, sp, incl) = builders::total_inclusion_into_set_p(&[1, 2], &cfg).unwrap();
        let fd = functor_document(&[("F", &incl, &triv, &sp.rc)]);
        let doc = Document::Functor(fd.clone());
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
        let td = TransformationDoc {
            source: 0,
            target: 0,
            components: triv
                .base
                .objects()
                .map(|a| sp.rc.base.identity(incl.on_obj(a)).0)
                .collect(),
            doc: fd,
        };
        let doc = Document::Transformation(td);
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn truncated_document_has_position() {
        let text = "format_version = 1\nkind = \"rest";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_version_rejected() {
        let rc = point_trivial();
        let text = serialize(&Document::Restriction(rc))
            .replace("format_version = 1", "format_version = 99");
        assert!(matches!(parse(&text), Err(Error::Structural(_))));
    }

    #[test]
    fn unknown_keys_rejected() {
        let rc = point_trivial();
        let mut text = serialize(&Document::Restriction(rc));
        text.push_str("mystery = 1\n");
        assert!(parse(&text).is_err());
    }

    #[test]
    fn join_overrides_round_trip() {
        let cfg = CheckConfig::default();
        let sp = builders::build_set_p(&[1], &cfg).unwrap();
        let id = sp.rc.base.identity(ObjId(0));
        let js =
            JoinStructure::with_overrides(sp.rc.clone(), [(ObjId(0), ObjId(0), vec![], id)]);
        let doc = Document::Join(js);
        let text = serialize(&doc);
        assert!(text.contains("[[join_override]]"));
        assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn stable_map_square_round_trip() {
        let l = crate::semilattice::MeetSemilattice::powerset(2);
        let idmap: Vec<usize> = (0..4).collect();
        let doc = Document::StableMap(StableMapDoc {
            lattices: vec![l],
            maps: ["h", "f", "g", "k"]
                .iter()
                .map(|n| NamedStableMap {
                    name: n.to_string(),
                    source: 0,
                    target: 0,
                    map: idmap.clone(),
                })
                .collect(),
        });
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn report_round_trip() {
        let doc = Document::Report(ReportDoc {
            subject: "check restriction".into(),
            ok: false,
            failures: vec![Failure::new("R1", vec![3], "f∘f̄ ≠ f")],
        });
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
    }
}
