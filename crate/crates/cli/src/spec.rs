//! Problem files: one `key = value` per line, strings in double quotes,
//! numbers bare, `#` starts a comment.
//!
//! ```text
//! # transport with smooth data
//! F = "u*p"
//! f = "sin(x)"
//! a = 1
//! b = 1
//! N = 8
//! nx = 256          # optional, default 256
//! out = "out/transport"
//! ```
//!
//! Required keys: `F`, `f`, `a`, `b`, `N`. Optional: `nx`, `ny`,
//! `lattice_n`, `max_halvings`, `samples_per_tile`, `out`, `y_max`, and
//! `F_args`, which must list exactly `x, y, u, p` when present.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ordpde::convergence::SolverConfig;
use ordpde::local_approx::ApproxConfig;
use ordpde::{Domain, Problem};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: key '{key}' given twice")]
    Duplicate { line: usize, key: String },

    #[error("missing required key '{0}'")]
    Missing(&'static str),

    #[error("{key}: {message}")]
    Invalid { key: &'static str, message: String },

    #[error("{key}: {source}")]
    Expr {
        key: &'static str,
        #[source]
        source: ordpde::Error,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Str(String),
    Num(String),
}

const KEYS: &[&str] = &[
    "F",
    "f",
    "a",
    "b",
    "N",
    "nx",
    "ny",
    "lattice_n",
    "max_halvings",
    "samples_per_tile",
    "out",
    "y_max",
    "F_args",
];

/// Validated contents of a problem file.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub flux_text: String,
    pub initial_text: String,
    pub a: f64,
    pub b: f64,
    pub n_terms: usize,
    pub nx: usize,
    pub ny: usize,
    pub lattice_n: usize,
    pub max_halvings: usize,
    pub samples_per_tile: usize,
    pub out: PathBuf,
    pub y_max: Option<f64>,
}

fn unquote(raw: &str, line: usize) -> Result<(Value, &str), SpecError> {
    let syntax = |message: &str| SpecError::Syntax {
        line,
        message: message.to_string(),
    };
    if let Some(body) = raw.strip_prefix('"') {
        let mut out = String::new();
        let mut chars = body.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => return Ok((Value::Str(out), &body[i + 1..])),
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    _ => return Err(syntax("bad escape in string")),
                },
                _ => out.push(c),
            }
        }
        return Err(syntax("unterminated string"));
    }
    let end = raw.find('#').unwrap_or(raw.len());
    let tok = raw[..end].trim();
    if tok.is_empty() {
        return Err(syntax("missing value"));
    }
    if tok.contains(char::is_whitespace) {
        return Err(syntax("unquoted value contains spaces; quote strings"));
    }
    Ok((Value::Num(tok.to_string()), &raw[end..]))
}

fn parse_pairs(text: &str) -> Result<BTreeMap<&'static str, (usize, Value)>, SpecError> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, rest)) = trimmed.split_once('=') else {
            return Err(SpecError::Syntax {
                line,
                message: "expected 'key = value'".into(),
            });
        };
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(SpecError::UnknownKey {
                line,
                key: key.to_string(),
            });
        };
        let (value, tail) = unquote(rest.trim(), line)?;
        let tail = tail.trim();
        if !(tail.is_empty() || tail.starts_with('#')) {
            return Err(SpecError::Syntax {
                line,
                message: format!("trailing text '{tail}'"),
            });
        }
        if map.insert(known, (line, value)).is_some() {
            return Err(SpecError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
    }
    Ok(map)
}

struct Fields(BTreeMap<&'static str, (usize, Value)>);

impl Fields {
    fn string(&self, key: &'static str) -> Result<Option<String>, SpecError> {
        match self.0.get(key) {
            None => Ok(None),
            Some((_, Value::Str(s))) => Ok(Some(s.clone())),
            Some((_, Value::Num(_))) => Err(SpecError::Invalid {
                key,
                message: "expected a quoted string".into(),
            }),
        }
    }

    fn number(&self, key: &'static str) -> Result<Option<&str>, SpecError> {
        match self.0.get(key) {
            None => Ok(None),
            Some((_, Value::Num(s))) => Ok(Some(s)),
            Some((_, Value::Str(_))) => Err(SpecError::Invalid {
                key,
                message: "expected a bare number".into(),
            }),
        }
    }

    fn positive_real(&self, key: &'static str) -> Result<Option<f64>, SpecError> {
        let Some(s) = self.number(key)? else {
            return Ok(None);
        };
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Some(v)),
            _ => Err(SpecError::Invalid {
                key,
                message: format!("expected a positive number, found '{s}'"),
            }),
        }
    }

    fn positive_int(&self, key: &'static str) -> Result<Option<usize>, SpecError> {
        let Some(s) = self.number(key)? else {
            return Ok(None);
        };
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(Some(v)),
            _ => Err(SpecError::Invalid {
                key,
                message: format!("expected a positive integer, found '{s}'"),
            }),
        }
    }
}

fn check_arity(args: &str) -> Result<(), SpecError> {
    let names: Vec<&str> = args.split(',').map(str::trim).collect();
    if names == ["x", "y", "u", "p"] {
        Ok(())
    } else {
        Err(SpecError::Invalid {
            key: "F_args",
            message: format!(
                "F takes exactly (x, y, u, p) with p = D_x u; found ({}) with {} arguments",
                names.join(", "),
                names.len()
            ),
        })
    }
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let fields = Fields(parse_pairs(text)?);
        if let Some(args) = fields.string("F_args")? {
            check_arity(&args)?;
        }
        let spec = ProblemSpec {
            flux_text: fields.string("F")?.ok_or(SpecError::Missing("F"))?,
            initial_text: fields.string("f")?.ok_or(SpecError::Missing("f"))?,
            a: fields.positive_real("a")?.ok_or(SpecError::Missing("a"))?,
            b: fields.positive_real("b")?.ok_or(SpecError::Missing("b"))?,
            n_terms: fields.positive_int("N")?.ok_or(SpecError::Missing("N"))?,
            nx: fields.positive_int("nx")?.unwrap_or(256),
            ny: fields.positive_int("ny")?.unwrap_or(256),
            lattice_n: fields.positive_int("lattice_n")?.unwrap_or(16),
            max_halvings: fields.positive_int("max_halvings")?.unwrap_or(40),
            samples_per_tile: fields.positive_int("samples_per_tile")?.unwrap_or(8),
            out: fields
                .string("out")?
                .map_or_else(|| PathBuf::from("out"), PathBuf::from),
            y_max: fields.positive_real("y_max")?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &std::path::Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), SpecError> {
        if self.nx < 2 || self.ny < 2 {
            return Err(SpecError::Invalid {
                key: "nx",
                message: "grid needs at least 2 cells per axis".into(),
            });
        }
        if self.lattice_n < 8 {
            return Err(SpecError::Invalid {
                key: "lattice_n",
                message: format!("must be at least 8, found {}", self.lattice_n),
            });
        }
        if self.samples_per_tile < 2 {
            return Err(SpecError::Invalid {
                key: "samples_per_tile",
                message: "must be at least 2".into(),
            });
        }
        if let Some(y) = self.y_max {
            if y > self.b {
                return Err(SpecError::Invalid {
                    key: "y_max",
                    message: format!("{y} exceeds b = {}", self.b),
                });
            }
        }
        self.problem().map(|_| ())
    }

    pub fn domain(&self) -> Domain<f64> {
        Domain::new(self.a, self.b).expect("validated positive half-widths")
    }

    /// Parses `F` and `f` and differentiates `f`.
    pub fn problem(&self) -> Result<Problem<f64>, SpecError> {
        let domain = self.domain();
        let flux = ordpde::Expr::parse(&self.flux_text, ordpde::VarSet::FLUX).map_err(|e| SpecError::Expr {
            key: "F",
            source: e.into(),
        })?;
        let initial =
            ordpde::Expr::parse(&self.initial_text, ordpde::VarSet::INITIAL).map_err(|e| SpecError::Expr {
                key: "f",
                source: e.into(),
            })?;
        Problem::new(flux, initial, domain).map_err(|source| SpecError::Expr { key: "f", source })
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            approx: ApproxConfig {
                lattice_n: self.lattice_n,
                samples_per_tile: self.samples_per_tile,
                max_halvings: self.max_halvings,
                initial_delta: None,
            },
            nx: self.nx,
            ny: self.ny,
        }
    }
}
