//! Resolution of `--space`, `--sheaf` and `--complex` arguments against the
//! bundled corpus and the file system, with the size caps applied.

use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sheaf_core::corpus;
use sheaf_core::finspace::FiniteSpace;
use sheaf_core::godement::Resolution;
use sheaf_core::sheaves::Sheaf;
use sheaf_core::spectral::{DoubleComplex, SheafComplex};

use crate::error::{CliError, CliResult};
use crate::format::{self, canonical_string, Workspace};

#[derive(Clone, Copy, Debug)]
pub struct Caps {
    pub points: usize,
    pub opens: usize,
    pub degree: usize,
    pub pages: usize,
}

impl Caps {
    pub fn check_degree(&self, k: usize) -> CliResult<()> {
        if k > self.degree {
            return Err(CliError::Cap { what: "degree", value: k as u128, cap: self.degree as u128 });
        }
        Ok(())
    }

    pub fn check_pages(&self, r: usize) -> CliResult<()> {
        if r > self.pages {
            return Err(CliError::Cap { what: "page", value: r as u128, cap: self.pages as u128 });
        }
        Ok(())
    }

    pub fn check_space(&self, x: &FiniteSpace) -> CliResult<()> {
        if x.len() > self.points {
            return Err(CliError::Cap { what: "point count", value: x.len() as u128, cap: self.points as u128 });
        }
        let opens = x.count_opens();
        if opens > self.opens as u128 {
            return Err(CliError::Cap { what: "open-set count", value: opens, cap: self.opens as u128 });
        }
        Ok(())
    }
}

/// Where an input came from and the digest of its canonical form.
#[derive(Clone, Debug)]
pub struct InputRecord {
    pub role: &'static str,
    pub source: String,
    pub sha256: String,
    pub canonical: Value,
}

impl InputRecord {
    fn new(role: &'static str, source: String, canonical: &Value) -> InputRecord {
        let sha256 = hex::encode(Sha256::digest(canonical_string(canonical).as_bytes()));
        InputRecord { role, source, sha256, canonical: canonical.clone() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "role": self.role, "source": self.source, "sha256": self.sha256 })
    }
}

pub enum ComplexInput {
    Sheaves(SheafComplex),
    Resolution(Resolution),
    Double(DoubleComplex),
}

pub struct Inputs {
    pub caps: Caps,
    pub records: Vec<InputRecord>,
}

fn is_file(arg: &str) -> bool {
    Path::new(arg).is_file()
}

fn unknown(what: &str, arg: &str) -> CliError {
    CliError::Usage(format!("`{arg}` is neither a file nor a bundled {what}"))
}

impl Inputs {
    pub fn new(caps: Caps) -> Inputs {
        Inputs { caps, records: Vec::new() }
    }

    fn record(&mut self, role: &'static str, arg: &str, from_file: bool, canonical: &Value) {
        let source = if from_file { format!("file:{arg}") } else { format!("corpus:{arg}") };
        let rec = InputRecord::new(role, source, canonical);
        if !self.records.iter().any(|r| r.role == rec.role && r.source == rec.source && r.sha256 == rec.sha256) {
            self.records.push(rec);
        }
    }

    /// The space, plus its corpus name when it is a bundled one.
    pub fn space(&mut self, arg: &str) -> CliResult<(FiniteSpace, Option<String>)> {
        let (x, name) = if is_file(arg) {
            match format::load_file(Path::new(arg))? {
                Workspace::Space(x) => (x, None),
                other => return Err(kind_error(arg, "space", other.kind())),
            }
        } else {
            (corpus::space(arg).ok_or_else(|| unknown("space", arg))?, Some(arg.to_string()))
        };
        self.caps.check_space(&x)?;
        self.record("space", arg, name.is_none(), &format::space_value(&x));
        Ok((x, name))
    }

    pub fn sheaf(&mut self, space: Option<&str>, arg: &str) -> CliResult<Sheaf> {
        if is_file(arg) {
            let loaded = match format::load_file(Path::new(arg))? {
                Workspace::Sheaf(s) => s,
                other => return Err(kind_error(arg, "sheaf", other.kind())),
            };
            if let Some(space) = space {
                let (x, _) = self.space(space)?;
                if !x.same_space(loaded.sheaf.space()) {
                    return Err(CliError::Usage(format!("{arg} lives on a different space than {space}")));
                }
            } else {
                self.caps.check_space(loaded.sheaf.space())?;
            }
            self.record("sheaf", arg, true, &format::sheaf_value(&loaded.space.reference, &loaded.sheaf));
            return Ok(loaded.sheaf);
        }
        let space = space.ok_or_else(|| CliError::Usage("a bundled sheaf needs --space".into()))?;
        let (x, name) = self.space(space)?;
        let name = name.ok_or_else(|| unknown("sheaf", arg))?;
        let f = corpus::sheaf(&x, &name, arg).map_err(|_| unknown("sheaf", arg))?;
        self.record("sheaf", arg, false, &format::sheaf_value(&json!(name), &f));
        Ok(f)
    }

    /// `kmax` sizes the bundled Godement complexes.
    pub fn complex(&mut self, space: Option<&str>, arg: &str, kmax: usize) -> CliResult<ComplexInput> {
        if is_file(arg) {
            let (input, canonical) = match format::load_file(Path::new(arg))? {
                w @ Workspace::SheafComplex(_) => {
                    let v = w.to_value();
                    let Workspace::SheafComplex(c) = w else { unreachable!() };
                    self.caps.check_space(&c.space.space)?;
                    match c.resolution {
                        Some(r) => (ComplexInput::Resolution(r), v),
                        None => (ComplexInput::Sheaves(c.complex), v),
                    }
                }
                w @ Workspace::DoubleComplex(_) => {
                    let v = w.to_value();
                    let Workspace::DoubleComplex(k) = w else { unreachable!() };
                    (ComplexInput::Double(k), v)
                }
                other => return Err(kind_error(arg, "sheaf_complex or double_complex", other.kind())),
            };
            self.record("complex", arg, true, &canonical);
            return Ok(input);
        }
        if let Some(k) = corpus::double_complex(arg) {
            self.record("complex", arg, false, &format::double_value(&k));
            return Ok(ComplexInput::Double(k));
        }
        if let Some(r) = corpus::resolution(arg) {
            self.caps.check_space(r.base.space())?;
            // bundled resolutions are named after their space
            let reference = json!(arg.split('_').next().unwrap_or(arg));
            let v = format::complex_value(&reference, &SheafComplex::new(r.terms.clone(), r.differentials.clone())?, Some(&r));
            self.record("complex", arg, false, &v);
            return Ok(ComplexInput::Resolution(r));
        }
        let space = space.ok_or_else(|| unknown("complex (bundled complexes need --space)", arg))?;
        let (x, name) = self.space(space)?;
        let name = name.ok_or_else(|| unknown("complex", arg))?;
        let l = corpus::complex(&x, &name, arg, kmax).map_err(|_| unknown("complex", arg))?;
        self.record("complex", arg, false, &format::complex_value(&json!(name), &l, None));
        Ok(ComplexInput::Sheaves(l))
    }
}

fn kind_error(arg: &str, expected: &str, found: &str) -> CliError {
    CliError::schema(arg, "$.kind", format!("expected {expected}, found {found}"))
}
