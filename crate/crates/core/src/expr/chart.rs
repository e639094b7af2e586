use thiserror::Error;

use super::Func;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChartError {
    #[error("chart dimension must be even and at least 2, got {0}")]
    OddOrEmpty(usize),
    #[error("invalid coordinate identifier `{0}`")]
    BadIdentifier(String),
    #[error("coordinate name `{0}` is reserved")]
    Reserved(String),
    #[error("duplicate coordinate name `{0}`")]
    Duplicate(String),
}

/// Coordinate chart of dimension 2n with named coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
    includes_time: bool,
}

impl Chart {
    /// Chart whose expressions may also use the time symbol `t`.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ChartError> {
        Self::with_time(names, true)
    }

    pub fn with_time<S: AsRef<str>>(names: &[S], includes_time: bool) -> Result<Self, ChartError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() || !names.len().is_multiple_of(2) {
            return Err(ChartError::OddOrEmpty(names.len()));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(ChartError::BadIdentifier(name.clone()));
            }
            if name == "t" || Func::from_name(name).is_some() {
                return Err(ChartError::Reserved(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(ChartError::Duplicate(name.clone()));
            }
        }
        Ok(Chart {
            names,
            includes_time,
        })
    }

    /// `z1, …, z{dim}`.
    pub fn standard(dim: usize) -> Result<Self, ChartError> {
        let names: Vec<String> = (1..=dim).map(|i| format!("z{i}")).collect();
        Self::new(&names)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Half the dimension.
    pub fn n(&self) -> usize {
        self.names.len() / 2
    }

    pub fn includes_time(&self) -> bool {
        self.includes_time
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
