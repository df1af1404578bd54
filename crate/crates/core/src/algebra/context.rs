use std::collections::HashSet;
use std::sync::Arc;

use super::AlgebraError;

/// Ordered complex variables, each paired with its conjugate symbol.
///
/// A variable flagged `real` is a holomorphic coordinate restricted to its
/// real locus: its conjugate is substituted by the variable itself, so no
/// polynomial ever carries an exponent in its barred slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    names: Vec<String>,
    real: Vec<bool>,
}

impl VarContext {
    pub fn new(names: Vec<String>, real: Vec<bool>) -> Result<Arc<Self>, AlgebraError> {
        assert_eq!(names.len(), real.len(), "one realness flag per variable");
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(AlgebraError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(VarContext { names, real }))
    }

    /// All-complex context; panics on duplicate names.
    pub fn complex(names: &[&str]) -> Arc<Self> {
        VarContext::new(
            names.iter().map(|s| s.to_string()).collect(),
            vec![false; names.len()],
        )
        .expect("duplicate variable name")
    }

    /// Context with `(name, is_real)` pairs; panics on duplicate names.
    pub fn with_flags(vars: &[(&str, bool)]) -> Arc<Self> {
        VarContext::new(
            vars.iter().map(|(n, _)| n.to_string()).collect(),
            vars.iter().map(|(_, r)| *r).collect(),
        )
        .expect("duplicate variable name")
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(VarContext {
            names: vec![],
            real: vec![],
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.real[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, AlgebraError> {
        self.index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))
    }

    /// Number of exponent slots: one per variable and one per conjugate.
    pub fn slots(&self) -> usize {
        2 * self.names.len()
    }

    pub fn slot(&self, var: usize, barred: bool) -> usize {
        if barred && !self.real[var] {
            var + self.names.len()
        } else {
            var
        }
    }

    /// The involution on slots: `z_j <-> z̄_j`, fixing real variables.
    pub fn conj_slot(&self, slot: usize) -> usize {
        let n = self.names.len();
        let var = slot % n;
        if self.real[var] {
            slot
        } else if slot < n {
            slot + n
        } else {
            slot - n
        }
    }

    /// Real coordinates of the variables: one per real variable, two
    /// (real part then imaginary part) per complex variable.
    pub fn real_dims(&self) -> usize {
        self.real.iter().map(|r| if *r { 1 } else { 2 }).sum()
    }

    /// Offset of a variable's first real coordinate in an interleaved box.
    pub fn real_offset(&self, var: usize) -> usize {
        self.real[..var]
            .iter()
            .map(|r| if *r { 1 } else { 2 })
            .sum()
    }
}
