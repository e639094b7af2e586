//! System definition files.
//!
//! A definition is a TOML document naming the chart, the Poisson bivector as
//! a sparse list of coordinate pairs, the Hamiltonian, the symmetry
//! generator, the checks to run, and optional sampling and flow settings.
//! Expressions are quoted strings in the grammar of [`crate::expr::parse`]
//! and may use the time symbol `t`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::expr::{parse, Chart, Expr, Sampling};
use crate::multifield::Multivector;
use crate::symcheck::{PhaseSystem, SystemError};

const TODA: &str = include_str!("../systems/toda.toml");

/// A verification step. Declaration order is dependency order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Symmetry,
    NonNoether,
    Conserved,
    Involution,
    YangBaxter,
    Bihamiltonian,
    Lax,
    Bicomplex,
    Lenard,
    Nijenhuis,
    Flow,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Symmetry,
        CheckKind::NonNoether,
        CheckKind::Conserved,
        CheckKind::Involution,
        CheckKind::YangBaxter,
        CheckKind::Bihamiltonian,
        CheckKind::Lax,
        CheckKind::Bicomplex,
        CheckKind::Lenard,
        CheckKind::Nijenhuis,
        CheckKind::Flow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Symmetry => "symmetry",
            CheckKind::NonNoether => "non_noether",
            CheckKind::Conserved => "conserved",
            CheckKind::Involution => "involution",
            CheckKind::YangBaxter => "yang_baxter",
            CheckKind::Bihamiltonian => "bihamiltonian",
            CheckKind::Lax => "lax",
            CheckKind::Bicomplex => "bicomplex",
            CheckKind::Lenard => "lenard",
            CheckKind::Nijenhuis => "nijenhuis",
            CheckKind::Flow => "flow",
        }
    }

    /// Checks whose results this one consumes.
    pub fn prerequisites(self) -> &'static [CheckKind] {
        use CheckKind::*;
        match self {
            Symmetry => &[],
            NonNoether => &[Symmetry],
            Conserved => &[NonNoether],
            Involution => &[Conserved],
            YangBaxter => &[NonNoether],
            Bihamiltonian => &[YangBaxter],
            Lax => &[NonNoether],
            Bicomplex => &[YangBaxter],
            Lenard => &[Lax, Bicomplex],
            Nijenhuis => &[YangBaxter],
            Flow => &[Symmetry],
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub z0: Vec<f64>,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Debug, Error)]
pub enum DefinitionError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: in {field}: {message}")]
    Expression {
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("unknown built-in system `{0}`")]
    UnknownBuiltin(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    a: String,
    b: String,
    value: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    count: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    ranges: Option<Vec<(f64, f64)>>,
    time_range: Option<(f64, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDefinition {
    name: Option<String>,
    dimension: usize,
    coordinates: Vec<String>,
    hamiltonian: Spanned<String>,
    bivector: Vec<RawEntry>,
    symmetry: Vec<Spanned<String>>,
    checks: Option<Vec<CheckKind>>,
    sampling: Option<RawSampling>,
    flow: Option<FlowConfig>,
}

/// A validated system definition.
#[derive(Clone, Debug)]
pub struct SystemDefinition {
    pub name: String,
    pub chart: Chart,
    pub w: Multivector,
    pub h: Expr,
    pub e: Multivector,
    /// Requested checks, deduplicated, in dependency order.
    pub checks: Vec<CheckKind>,
    pub sampling: Sampling,
    pub flow: Option<FlowConfig>,
}

fn line_column(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

fn invalid(msg: impl Into<String>) -> DefinitionError {
    DefinitionError::Invalid(msg.into())
}

impl SystemDefinition {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, DefinitionError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|source| DefinitionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&src)
    }

    /// Built-in definitions; currently only `toda`.
    pub fn builtin(name: &str) -> Result<Self, DefinitionError> {
        match name {
            "toda" => Self::parse(TODA),
            other => Err(DefinitionError::UnknownBuiltin(other.to_string())),
        }
    }

    pub fn builtin_source(name: &str) -> Option<&'static str> {
        (name == "toda").then_some(TODA)
    }

    pub fn parse(src: &str) -> Result<Self, DefinitionError> {
        let raw: RawDefinition = toml::from_str(src).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_column(src, s.start))
                .unwrap_or((1, 1));
            DefinitionError::Syntax {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        if raw.dimension == 0 || raw.dimension % 2 == 1 {
            return Err(invalid(format!(
                "dimension must be even and positive, got {}",
                raw.dimension
            )));
        }
        if raw.coordinates.len() != raw.dimension {
            return Err(invalid(format!(
                "dimension is {} but {} coordinates are listed",
                raw.dimension,
                raw.coordinates.len()
            )));
        }
        let chart = Chart::with_time(&raw.coordinates, true).map_err(|e| invalid(e.to_string()))?;
        let dim = raw.dimension;
        let expr = |field: String, s: &Spanned<String>| -> Result<Expr, DefinitionError> {
            parse(s.get_ref(), &chart).map_err(|e| {
                let (line, column) = line_column(src, s.span().start + e.column);
                DefinitionError::Expression {
                    field,
                    line,
                    column,
                    message: e.kind.to_string(),
                }
            })
        };

        let h = expr("hamiltonian".into(), &raw.hamiltonian)?;

        let mut seen = std::collections::BTreeSet::new();
        let mut terms = Vec::new();
        for entry in &raw.bivector {
            let idx = |name: &str| {
                chart.index_of(name).ok_or_else(|| {
                    invalid(format!("bivector refers to unknown coordinate `{name}`"))
                })
            };
            let (a, b) = (idx(&entry.a)?, idx(&entry.b)?);
            if a >= b {
                return Err(invalid(format!(
                    "bivector pair ({}, {}) must be in chart order",
                    entry.a, entry.b
                )));
            }
            if !seen.insert((a, b)) {
                return Err(invalid(format!(
                    "bivector pair ({}, {}) listed twice",
                    entry.a, entry.b
                )));
            }
            let field = format!("bivector ({}, {})", entry.a, entry.b);
            terms.push((vec![a, b], expr(field, &entry.value)?));
        }
        let w = Multivector::from_terms(dim, 2, terms);

        if raw.symmetry.len() != dim {
            return Err(invalid(format!(
                "symmetry needs {dim} components, got {}",
                raw.symmetry.len()
            )));
        }
        let comps = raw
            .symmetry
            .iter()
            .enumerate()
            .map(|(i, s)| expr(format!("symmetry component {}", chart.name(i)), s))
            .collect::<Result<Vec<_>, _>>()?;
        let e = Multivector::from_components(comps);

        let mut checks = raw.checks.unwrap_or_else(|| CheckKind::ALL.to_vec());
        checks.sort();
        checks.dedup();

        let mut sampling = Sampling::new(dim);
        if let Some(s) = raw.sampling {
            sampling.count = s.count.unwrap_or(sampling.count);
            sampling.seed = s.seed.unwrap_or(sampling.seed);
            sampling.tol = s.tol.unwrap_or(sampling.tol);
            sampling.ranges = s.ranges.unwrap_or(sampling.ranges);
            sampling.time_range = s.time_range.unwrap_or(sampling.time_range);
        }
        validate_sampling(&sampling, dim)?;

        if let Some(flow) = &raw.flow {
            validate_flow(flow, dim)?;
        }

        Ok(SystemDefinition {
            name: raw.name.unwrap_or_else(|| "system".to_string()),
            chart,
            w,
            h,
            e,
            checks,
            sampling,
            flow: raw.flow,
        })
    }

    pub fn system(&self) -> Result<PhaseSystem, SystemError> {
        PhaseSystem::new(
            self.chart.clone(),
            self.w.clone(),
            self.h.clone(),
            self.e.clone(),
            &self.sampling,
        )
    }
}

pub fn validate_sampling(s: &Sampling, dim: usize) -> Result<(), DefinitionError> {
    if s.count == 0 {
        return Err(invalid("sampling count must be positive"));
    }
    if !(s.tol > 0.0 && s.tol.is_finite()) {
        return Err(invalid("sampling tol must be positive"));
    }
    if s.ranges.len() != dim {
        return Err(invalid(format!(
            "sampling needs {dim} ranges, got {}",
            s.ranges.len()
        )));
    }
    let ok = |&(lo, hi): &(f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
    if !s.ranges.iter().all(ok) || !ok(&s.time_range) {
        return Err(invalid(
            "sampling ranges must be finite with lower <= upper",
        ));
    }
    Ok(())
}

pub fn validate_flow(f: &FlowConfig, dim: usize) -> Result<(), DefinitionError> {
    if f.z0.len() != dim {
        return Err(invalid(format!(
            "flow z0 needs {dim} values, got {}",
            f.z0.len()
        )));
    }
    if !(f.t_end > 0.0 && f.t_end.is_finite()) || !(f.dt > 0.0 && f.dt.is_finite()) {
        return Err(invalid("flow T and dt must be positive"));
    }
    if f.z0.iter().any(|v| !v.is_finite()) {
        return Err(invalid("flow z0 must be finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses() {
        let d = SystemDefinition::builtin("toda").unwrap();
        assert_eq!(d.chart.dim(), 4);
        assert_eq!(d.checks.len(), 11);
        assert_eq!(d.w.len(), 2);
        assert_eq!(d.flow.as_ref().unwrap().dt, 1e-3);
        assert!(d.e.get(&[0]).depends_on_time());
    }

    #[test]
    fn expression_errors_point_into_the_file() {
        let src = TODA.replace("z1^2/2 + z2^2/2", "z1^2/2 + q2^2/2");
        match SystemDefinition::parse(&src) {
            Err(DefinitionError::Expression {
                field,
                line,
                column,
                ..
            }) => {
                assert_eq!(field, "hamiltonian");
                let text_line = src.lines().nth(line - 1).unwrap();
                assert_eq!(&text_line[column - 1..column + 1], "q2");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_and_validation_errors() {
        assert!(matches!(
            SystemDefinition::parse("dimension = "),
            Err(DefinitionError::Syntax { .. })
        ));
        let odd = TODA.replace("dimension = 4", "dimension = 3");
        assert!(matches!(
            SystemDefinition::parse(&odd),
            Err(DefinitionError::Invalid(_))
        ));
        let swapped = TODA.replace(r#"a = "z1", b = "z3""#, r#"a = "z3", b = "z1""#);
        assert!(matches!(
            SystemDefinition::parse(&swapped),
            Err(DefinitionError::Invalid(_))
        ));
        let unknown = TODA.replace(r#""flow","#, r#""flows","#);
        assert!(matches!(
            SystemDefinition::parse(&unknown),
            Err(DefinitionError::Syntax { .. })
        ));
        assert!(matches!(
            SystemDefinition::builtin("kepler"),
            Err(DefinitionError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn checks_are_sorted_into_dependency_order() {
        let src = TODA.replace(
            r#"checks = ["#,
            r#"checks = ["lenard", "symmetry", "symmetry", "#,
        );
        let d = SystemDefinition::parse(&src).unwrap();
        assert_eq!(d.checks.first(), Some(&CheckKind::Symmetry));
        assert_eq!(d.checks.len(), 11);
    }
}
