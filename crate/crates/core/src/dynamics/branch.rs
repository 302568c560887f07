use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchKind {
    SecondGrade,
    EulerAlpha,
    NavierStokes,
    Euler,
}

impl BranchKind {
    pub fn name(&self) -> &'static str {
        match self {
            BranchKind::SecondGrade => "second-grade",
            BranchKind::EulerAlpha => "euler-alpha",
            BranchKind::NavierStokes => "navier-stokes",
            BranchKind::Euler => "euler",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "second-grade" => Some(BranchKind::SecondGrade),
            "euler-alpha" => Some(BranchKind::EulerAlpha),
            "navier-stokes" => Some(BranchKind::NavierStokes),
            "euler" => Some(BranchKind::Euler),
            _ => None,
        }
    }
}

impl fmt::Display for BranchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One member of the model family, fixed by `(alpha, nu)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelBranch {
    kind: BranchKind,
    alpha: f64,
    nu: f64,
}

impl ModelBranch {
    /// Picks the branch from which of `alpha`, `nu` vanish.
    pub fn classify(alpha: f64, nu: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be >= 0, got {nu}")));
        }
        let kind = match (alpha > 0.0, nu > 0.0) {
            (true, true) => BranchKind::SecondGrade,
            (true, false) => BranchKind::EulerAlpha,
            (false, true) => BranchKind::NavierStokes,
            (false, false) => BranchKind::Euler,
        };
        Ok(Self { kind, alpha, nu })
    }

    /// Like [`classify`](Self::classify) but insists on `kind`.
    pub fn new(kind: BranchKind, alpha: f64, nu: f64) -> Result<Self> {
        let b = Self::classify(alpha, nu)?;
        if b.kind != kind {
            return Err(Error::WrongBranch(format!(
                "alpha = {alpha}, nu = {nu} is the {} branch, not {kind}",
                b.kind
            )));
        }
        Ok(b)
    }

    pub fn kind(&self) -> BranchKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `u = 0` on the walls (every branch but Euler).
    pub fn no_slip(&self) -> bool {
        self.kind != BranchKind::Euler
    }

    pub fn has_alpha(&self) -> bool {
        self.alpha > 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(ModelBranch::classify(0.1, 0.01).unwrap().kind(), BranchKind::SecondGrade);
        assert_eq!(ModelBranch::classify(0.1, 0.0).unwrap().kind(), BranchKind::EulerAlpha);
        assert_eq!(ModelBranch::classify(0.0, 0.1).unwrap().kind(), BranchKind::NavierStokes);
        assert_eq!(ModelBranch::classify(0.0, 0.0).unwrap().kind(), BranchKind::Euler);
        assert!(ModelBranch::classify(-1.0, 0.0).is_err());
        assert!(ModelBranch::classify(0.0, f64::NAN).is_err());
        assert!(ModelBranch::new(BranchKind::Euler, 0.1, 0.0).is_err());
        for k in [
            BranchKind::SecondGrade,
            BranchKind::EulerAlpha,
            BranchKind::NavierStokes,
            BranchKind::Euler,
        ] {
            assert_eq!(BranchKind::from_name(k.name()), Some(k));
        }
    }
}
