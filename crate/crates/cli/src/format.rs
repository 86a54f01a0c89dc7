//! The JSON workspace formats: spaces, sheaves, sheaf complexes (optionally
//! carrying a resolution) and double complexes.
//!
//! Every integer is read as an arbitrary-precision value. Serialization is
//! canonical: sorted keys, covering pairs only, two-space indentation and a
//! trailing newline.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use sheaf_core::corpus;
use sheaf_core::exactalg::{FpGroup, GroupHom, IntMatrix};
use sheaf_core::finspace::{build_space, FiniteSpace};
use sheaf_core::godement::Resolution;
use sheaf_core::sheaves::{build_sheaf, Sheaf, SheafHom};
use sheaf_core::spectral::{DoubleComplex, SheafComplex};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u64 = 1;

/// A space together with how a document refers to it: a corpus name, a
/// relative file name, or an inline space document.
#[derive(Clone, Debug)]
pub struct SpaceRef {
    pub reference: Value,
    pub space: FiniteSpace,
}

#[derive(Clone, Debug)]
pub struct LoadedSheaf {
    pub space: SpaceRef,
    pub sheaf: Sheaf,
}

#[derive(Clone, Debug)]
pub struct LoadedComplex {
    pub space: SpaceRef,
    pub complex: SheafComplex,
    pub resolution: Option<Resolution>,
}

#[derive(Clone, Debug)]
pub enum Workspace {
    Space(FiniteSpace),
    Sheaf(LoadedSheaf),
    SheafComplex(LoadedComplex),
    DoubleComplex(DoubleComplex),
}

impl Workspace {
    pub fn kind(&self) -> &'static str {
        match self {
            Workspace::Space(_) => "space",
            Workspace::Sheaf(_) => "sheaf",
            Workspace::SheafComplex(_) => "sheaf_complex",
            Workspace::DoubleComplex(_) => "double_complex",
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Workspace::Space(x) => space_value(x),
            Workspace::Sheaf(s) => sheaf_value(&s.space.reference, &s.sheaf),
            Workspace::SheafComplex(c) => complex_value(&c.space.reference, &c.complex, c.resolution.as_ref()),
            Workspace::DoubleComplex(k) => double_value(k),
        }
    }
}

pub fn canonical_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn load_file(path: &Path) -> CliResult<Workspace> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { file: file.clone(), message: e.to_string() })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    load_str(&text, &file, &base)
}

/// Parses a document; `base` resolves file references inside it.
pub fn load_str(text: &str, file: &str, base: &Path) -> CliResult<Workspace> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        file: file.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let r = Reader { file: file.to_string(), base: base.to_path_buf() };
    r.document(&v)
}

struct Reader {
    file: String,
    base: PathBuf,
}

impl Reader {
    fn err(&self, path: &str, msg: impl Into<String>) -> CliError {
        CliError::schema(&self.file, path, msg)
    }

    fn obj<'v>(&self, v: &'v Value, path: &str) -> CliResult<&'v Map<String, Value>> {
        v.as_object().ok_or_else(|| self.err(path, "expected an object"))
    }

    fn arr<'v>(&self, v: &'v Value, path: &str) -> CliResult<&'v Vec<Value>> {
        v.as_array().ok_or_else(|| self.err(path, "expected an array"))
    }

    fn field<'v>(&self, o: &'v Map<String, Value>, key: &str, path: &str) -> CliResult<&'v Value> {
        o.get(key).ok_or_else(|| self.err(path, format!("missing field `{key}`")))
    }

    fn string<'v>(&self, v: &'v Value, path: &str) -> CliResult<&'v str> {
        v.as_str().ok_or_else(|| self.err(path, "expected a string"))
    }

    fn int(&self, v: &Value, path: &str) -> CliResult<BigInt> {
        match v {
            Value::Number(n) => n.to_string().parse().map_err(|_| self.err(path, format!("`{n}` is not an integer"))),
            _ => Err(self.err(path, "expected an integer")),
        }
    }

    fn count(&self, v: &Value, path: &str) -> CliResult<usize> {
        let n = self.int(v, path)?;
        usize::try_from(n).map_err(|_| self.err(path, "expected a nonnegative count"))
    }

    fn header(&self, o: &Map<String, Value>, kind: &str, path: &str) -> CliResult<()> {
        let version = self.field(o, "format_version", path)?;
        if version.as_u64() != Some(FORMAT_VERSION) {
            return Err(self.err(&format!("{path}.format_version"), format!("unsupported version {version}")));
        }
        let k = self.string(self.field(o, "kind", path)?, &format!("{path}.kind"))?;
        if k != kind {
            return Err(self.err(&format!("{path}.kind"), format!("expected `{kind}`, found `{k}`")));
        }
        Ok(())
    }

    fn document(&self, v: &Value) -> CliResult<Workspace> {
        let o = self.obj(v, "$")?;
        let kind = self.string(self.field(o, "kind", "$")?, "$.kind")?;
        match kind {
            "space" => Ok(Workspace::Space(self.space_doc(v, "$")?)),
            "sheaf" => {
                self.header(o, "sheaf", "$")?;
                let space = self.space_ref(self.field(o, "space", "$")?, "$.space")?;
                let sheaf = self.sheaf_body(&space.space, v, "$")?;
                Ok(Workspace::Sheaf(LoadedSheaf { space, sheaf }))
            }
            "sheaf_complex" => Ok(Workspace::SheafComplex(self.complex_doc(o)?)),
            "double_complex" => Ok(Workspace::DoubleComplex(self.double_doc(o)?)),
            other => Err(self.err("$.kind", format!("unknown kind `{other}`"))),
        }
    }

    fn space_doc(&self, v: &Value, path: &str) -> CliResult<FiniteSpace> {
        let o = self.obj(v, path)?;
        self.header(o, "space", path)?;
        let points: Vec<String> = self
            .arr(self.field(o, "points", path)?, &format!("{path}.points"))?
            .iter()
            .enumerate()
            .map(|(i, p)| self.string(p, &format!("{path}.points[{i}]")).map(str::to_string))
            .collect::<CliResult<_>>()?;
        let mut pairs = Vec::new();
        for (i, pair) in self.arr(self.field(o, "leq", path)?, &format!("{path}.leq"))?.iter().enumerate() {
            let at = format!("{path}.leq[{i}]");
            let pair = self.arr(pair, &at)?;
            if pair.len() != 2 {
                return Err(self.err(&at, "expected a pair [p, q]"));
            }
            pairs.push((self.string(&pair[0], &at)?.to_string(), self.string(&pair[1], &at)?.to_string()));
        }
        Ok(build_space(&points, &pairs)?)
    }

    fn space_ref(&self, v: &Value, path: &str) -> CliResult<SpaceRef> {
        match v {
            Value::String(name) => {
                let space = match corpus::space(name) {
                    Some(x) => x,
                    None => match load_file(&self.base.join(name))? {
                        Workspace::Space(x) => x,
                        other => return Err(self.err(path, format!("`{name}` holds a {}, not a space", other.kind()))),
                    },
                };
                Ok(SpaceRef { reference: v.clone(), space })
            }
            Value::Object(_) => {
                let space = self.space_doc(v, path)?;
                Ok(SpaceRef { reference: space_value(&space), space })
            }
            _ => Err(self.err(path, "expected a space name or an inline space")),
        }
    }

    fn group(&self, v: &Value, path: &str) -> CliResult<FpGroup> {
        let o = self.obj(v, path)?;
        let gens = self.count(self.field(o, "gens", path)?, &format!("{path}.gens"))?;
        let rels = self.arr(self.field(o, "rels", path)?, &format!("{path}.rels"))?;
        let mut m = IntMatrix::zeros(rels.len(), gens);
        for (i, row) in rels.iter().enumerate() {
            let at = format!("{path}.rels[{i}]");
            let row = self.arr(row, &at)?;
            if row.len() != gens {
                return Err(self.err(&at, format!("relation has {} entries, expected {gens}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = self.int(x, &format!("{at}[{j}]"))?;
            }
        }
        Ok(FpGroup::new(gens, m)?)
    }

    fn matrix(&self, v: &Value, path: &str, rows: usize, cols: usize) -> CliResult<IntMatrix> {
        let rs = self.arr(v, path)?;
        if rs.len() != rows {
            return Err(self.err(path, format!("matrix has {} rows, expected {rows}", rs.len())));
        }
        let mut m = IntMatrix::zeros(rows, cols);
        for (i, row) in rs.iter().enumerate() {
            let at = format!("{path}[{i}]");
            let row = self.arr(row, &at)?;
            if row.len() != cols {
                return Err(self.err(&at, format!("row has {} entries, expected {cols}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = self.int(x, &format!("{at}[{j}]"))?;
            }
        }
        Ok(m)
    }

    fn hom(&self, v: &Value, path: &str, src: &FpGroup, tgt: &FpGroup) -> CliResult<GroupHom> {
        let m = self.matrix(v, path, tgt.ngens(), src.ngens())?;
        GroupHom::new(src.clone(), tgt.clone(), m).map_err(|e| self.err(path, e.to_string()))
    }

    fn point(&self, x: &FiniteSpace, name: &str, path: &str) -> CliResult<usize> {
        x.point(name).map_err(|_| self.err(path, format!("unknown point `{name}`")))
    }

    /// One group per point, keyed by point name.
    fn per_point<T>(
        &self,
        x: &FiniteSpace,
        v: &Value,
        path: &str,
        mut each: impl FnMut(usize, &Value, &str) -> CliResult<T>,
    ) -> CliResult<Vec<T>> {
        let o = self.obj(v, path)?;
        for key in o.keys() {
            self.point(x, key, &format!("{path}.{key}"))?;
        }
        x.points()
            .map(|p| {
                let name = x.name(p);
                let at = format!("{path}.{name}");
                let item = o.get(name).ok_or_else(|| self.err(path, format!("missing entry for point `{name}`")))?;
                each(p, item, &at)
            })
            .collect()
    }

    fn sheaf_body(&self, x: &FiniteSpace, v: &Value, path: &str) -> CliResult<Sheaf> {
        let o = self.obj(v, path)?;
        let stalks =
            self.per_point(x, self.field(o, "stalks", path)?, &format!("{path}.stalks"), |_, g, at| self.group(g, at))?;
        let rpath = format!("{path}.restrictions");
        let mut maps = Vec::new();
        for (key, m) in self.obj(self.field(o, "restrictions", path)?, &rpath)? {
            let at = format!("{rpath}.{key}");
            let (p, q) = key.split_once(':').ok_or_else(|| self.err(&at, "expected a key `p:q`"))?;
            let (p, q) = (self.point(x, p, &at)?, self.point(x, q, &at)?);
            if !x.leq(q, p) {
                return Err(self.err(&at, format!("{} is not below {}", x.name(q), x.name(p))));
            }
            maps.push((p, q, self.hom(m, &at, &stalks[p], &stalks[q])?));
        }
        Ok(build_sheaf(x, stalks, maps)?)
    }

    fn sheaf_map(&self, v: &Value, path: &str, src: &Sheaf, tgt: &Sheaf) -> CliResult<SheafHom> {
        let x = src.space();
        let maps = self.per_point(x, v, path, |p, m, at| self.hom(m, at, src.stalk(p), tgt.stalk(p)))?;
        Ok(SheafHom::new(src.clone(), tgt.clone(), maps)?)
    }

    fn complex_doc(&self, o: &Map<String, Value>) -> CliResult<LoadedComplex> {
        self.header(o, "sheaf_complex", "$")?;
        let space = self.space_ref(self.field(o, "space", "$")?, "$.space")?;
        let x = &space.space;
        let terms: Vec<Sheaf> = self
            .arr(self.field(o, "terms", "$")?, "$.terms")?
            .iter()
            .enumerate()
            .map(|(k, t)| self.sheaf_body(x, t, &format!("$.terms[{k}]")))
            .collect::<CliResult<_>>()?;
        if terms.is_empty() {
            return Err(self.err("$.terms", "a complex needs at least one term"));
        }
        let ds = self.arr(self.field(o, "differentials", "$")?, "$.differentials")?;
        if ds.len() + 1 != terms.len() {
            return Err(self.err("$.differentials", format!("expected {} differentials", terms.len() - 1)));
        }
        let differentials: Vec<SheafHom> = ds
            .iter()
            .enumerate()
            .map(|(k, d)| self.sheaf_map(d, &format!("$.differentials[{k}]"), &terms[k], &terms[k + 1]))
            .collect::<CliResult<_>>()?;
        let resolution = match o.get("resolution") {
            None => None,
            Some(r) => {
                let ro = self.obj(r, "$.resolution")?;
                let base = self.sheaf_body(x, self.field(ro, "base", "$.resolution")?, "$.resolution.base")?;
                let aug = self.sheaf_map(
                    self.field(ro, "augmentation", "$.resolution")?,
                    "$.resolution.augmentation",
                    &base,
                    &terms[0],
                )?;
                let truncated = match ro.get("truncated") {
                    None => false,
                    Some(t) => t.as_bool().ok_or_else(|| self.err("$.resolution.truncated", "expected a boolean"))?,
                };
                Some(Resolution::new(base, terms.clone(), aug, differentials.clone(), truncated)?)
            }
        };
        let complex = SheafComplex::new(terms, differentials)?;
        Ok(LoadedComplex { space, complex, resolution })
    }

    fn cell_key(&self, key: &str, path: &str, pmax: usize, qmax: usize) -> CliResult<(usize, usize)> {
        let bad = || self.err(path, format!("expected a key `p,q` within the bounds, found `{key}`"));
        let (p, q) = key.split_once(',').ok_or_else(bad)?;
        let (p, q): (usize, usize) = (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?);
        if p > pmax || q > qmax {
            return Err(bad());
        }
        Ok((p, q))
    }

    fn double_doc(&self, o: &Map<String, Value>) -> CliResult<DoubleComplex> {
        self.header(o, "double_complex", "$")?;
        let pmax = self.count(self.field(o, "pmax", "$")?, "$.pmax")?;
        let qmax = self.count(self.field(o, "qmax", "$")?, "$.qmax")?;
        let mut cells = vec![vec![FpGroup::trivial(); qmax + 1]; pmax + 1];
        for (key, g) in self.obj(self.field(o, "cells", "$")?, "$.cells")? {
            let at = format!("$.cells.{key}");
            let (p, q) = self.cell_key(key, &at, pmax, qmax)?;
            cells[p][q] = self.group(g, &at)?;
        }
        let cell = |p: usize, q: usize| cells.get(p).and_then(|c| c.get(q)).cloned().unwrap_or_else(FpGroup::trivial);
        let mut maps = [BTreeMap::new(), BTreeMap::new()];
        for (i, (name, dp, dq)) in [("vert", 0, 1), ("horiz", 1, 0)].into_iter().enumerate() {
            let Some(v) = o.get(name) else { continue };
            for (key, m) in self.obj(v, &format!("$.{name}"))? {
                let at = format!("$.{name}.{key}");
                let (p, q) = self.cell_key(key, &at, pmax, qmax)?;
                maps[i].insert((p, q), self.hom(m, &at, &cell(p, q), &cell(p + dp, q + dq))?);
            }
        }
        let [vert, horiz] = maps;
        Ok(DoubleComplex::new(cells, vert, horiz)?)
    }
}

pub fn num(x: &BigInt) -> Value {
    serde_json::from_str(&x.to_string()).expect("integers are json numbers")
}

pub fn group_value(g: &FpGroup) -> Value {
    json!({ "gens": g.ngens(), "rels": matrix_value(g.relations()) })
}

pub fn matrix_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(num).collect())).collect())
}

pub fn space_value(x: &FiniteSpace) -> Value {
    let leq: Vec<Value> = x.covers().iter().map(|&(lo, hi)| json!([x.name(lo), x.name(hi)])).collect();
    json!({ "format_version": FORMAT_VERSION, "kind": "space", "points": x.names(), "leq": leq })
}

fn sheaf_body_value(f: &Sheaf) -> Value {
    let x = f.space();
    let stalks: Map<String, Value> = x.points().map(|p| (x.name(p).to_string(), group_value(f.stalk(p)))).collect();
    let restrictions: Map<String, Value> = x
        .covers()
        .iter()
        .map(|&(q, p)| (format!("{}:{}", x.name(p), x.name(q)), matrix_value(f.restrict(p, q).matrix())))
        .collect();
    json!({ "stalks": stalks, "restrictions": restrictions })
}

fn sheaf_map_value(phi: &SheafHom) -> Value {
    let x = phi.source().space();
    Value::Object(x.points().map(|p| (x.name(p).to_string(), matrix_value(phi.stalk_map(p).matrix()))).collect())
}

pub fn sheaf_value(space: &Value, f: &Sheaf) -> Value {
    let mut v = sheaf_body_value(f);
    v["format_version"] = json!(FORMAT_VERSION);
    v["kind"] = json!("sheaf");
    v["space"] = space.clone();
    v
}

pub fn complex_value(space: &Value, l: &SheafComplex, r: Option<&Resolution>) -> Value {
    let mut v = json!({
        "format_version": FORMAT_VERSION,
        "kind": "sheaf_complex",
        "space": space,
        "terms": l.terms().iter().map(sheaf_body_value).collect::<Vec<_>>(),
        "differentials": l.differentials().iter().map(sheaf_map_value).collect::<Vec<_>>(),
    });
    if let Some(r) = r {
        v["resolution"] = json!({
            "base": sheaf_body_value(&r.base),
            "augmentation": sheaf_map_value(&r.augmentation),
            "truncated": r.truncated,
        });
    }
    v
}

pub fn double_value(k: &DoubleComplex) -> Value {
    let mut cells = Map::new();
    let mut vert = Map::new();
    let mut horiz = Map::new();
    for p in 0..=k.pmax() {
        for q in 0..=k.qmax() {
            let key = format!("{p},{q}");
            if k.cell(p, q).ngens() > 0 {
                cells.insert(key.clone(), group_value(&k.cell(p, q)));
            }
            if !k.d_vert(p, q).matrix().is_zero() {
                vert.insert(key.clone(), matrix_value(k.d_vert(p, q).matrix()));
            }
            if !k.d_horiz(p, q).matrix().is_zero() {
                horiz.insert(key, matrix_value(k.d_horiz(p, q).matrix()));
            }
        }
    }
    json!({
        "format_version": FORMAT_VERSION,
        "kind": "double_complex",
        "pmax": k.pmax(),
        "qmax": k.qmax(),
        "cells": cells,
        "vert": vert,
        "horiz": horiz,
    })
}
