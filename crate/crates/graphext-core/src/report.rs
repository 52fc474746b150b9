use alloc::vec::Vec;

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SkewSelfAdjoint,
    SelfAdjoint,
    ContractionGenerator,
    Neither,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SkewSelfAdjoint => "skew_self_adjoint",
            Verdict::SelfAdjoint => "self_adjoint",
            Verdict::ContractionGenerator => "contraction_generator",
            Verdict::Neither => "neither",
        }
    }

    /// Whether the verdict promises norm conservation.
    pub fn is_unitary(self) -> bool {
        matches!(self, Verdict::SkewSelfAdjoint | Verdict::SelfAdjoint)
    }
}

/// Outcome of a classification with its numeric certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    /// `|L* H_cod L - H_dom|_F`, when a coupling matrix is present.
    pub unitary_residual: Option<f64>,
    /// Largest eigenvalue of `L* H_cod L - H_dom`.
    pub contraction_max_eigenvalue: Option<f64>,
    /// Largest eigenvalue of the adjoint-side test used by the verdict.
    pub adjoint_max_eigenvalue: Option<f64>,
    /// Adjoint-side test over the whole space, reported for comparison.
    pub adjoint_full_max_eigenvalue: Option<f64>,
    /// Largest `|form(U, V)|` over an orthonormal basis of the domain.
    pub form_on_domain: f64,
    /// Largest eigenvalue of `Re[A U, U]` restricted to the domain traces.
    pub dissipation_max_eigenvalue: f64,
    pub domain_dim: usize,
    /// Largest domain dimension compatible with the verdict's sign condition.
    pub maximal_dim: usize,
    /// Direct certificates agree with the verdict.
    pub criterion_agrees: bool,
    pub tags: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDeficiency {
    pub edge: usize,
    pub d_minus: usize,
    pub d_plus: usize,
    pub roots_minus: Vec<C64>,
    pub roots_plus: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyReport {
    pub d_minus: usize,
    pub d_plus: usize,
    pub edges: Vec<EdgeDeficiency>,
}
