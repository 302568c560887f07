use std::fmt;

use crate::error::{Error, Result};

/// Region of the `(alpha, nu)` plane, delimited by `nu = alpha^{2/3}`, `alpha^{6/5}` and `alpha^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegimeRegion {
    /// `nu > alpha^{2/3}`
    I,
    II,
    III,
    /// `nu < alpha^2`
    IV,
    /// On a separating curve; named by the two regions it separates, e.g. `"III/IV"`.
    Boundary(&'static str),
}

impl RegimeRegion {
    /// Short label: `I` .. `IV` or `III/IV` style for curves.
    pub fn label(&self) -> &'static str {
        match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::Boundary(s) => s,
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Some(match s {
            "I" => Self::I,
            "II" => Self::II,
            "III" => Self::III,
            "IV" => Self::IV,
            "I/II" => Self::Boundary("I/II"),
            "II/III" => Self::Boundary("II/III"),
            "III/IV" => Self::Boundary("III/IV"),
            _ => return None,
        })
    }

    /// `1 ..= 4` for regions, the midpoint for curves.
    pub fn index(&self) -> f64 {
        match self {
            Self::I => 1.0,
            Self::II => 2.0,
            Self::III => 3.0,
            Self::IV => 4.0,
            Self::Boundary("I/II") => 1.5,
            Self::Boundary("II/III") => 2.5,
            Self::Boundary(_) => 3.5,
        }
    }
}

impl fmt::Display for RegimeRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Boundary(s) => write!(f, "boundary {s}"),
            r => write!(f, "region {}", r.label()),
        }
    }
}

/// Curves `nu = alpha^p` from the viscous side inwards, with the curve names.
pub const REGIME_CURVES: [(f64, &str); 3] = [(2.0 / 3.0, "I/II"), (6.0 / 5.0, "II/III"), (2.0, "III/IV")];

/// Relative distance to a curve below which a point counts as lying on it.
pub const CURVE_TOL: f64 = 1e-9;

pub fn classify_regime(alpha: f64, nu: f64) -> Result<RegimeRegion> {
    let inside = |v: f64| v > 0.0 && v < 1.0;
    if !inside(alpha) || !inside(nu) {
        return Err(Error::InvalidParameter(format!(
            "regime map needs alpha, nu in (0, 1), got alpha = {alpha}, nu = {nu}"
        )));
    }
    let regions = [RegimeRegion::I, RegimeRegion::II, RegimeRegion::III];
    for ((p, name), region) in REGIME_CURVES.into_iter().zip(regions) {
        let curve = alpha.powf(p);
        if (nu - curve).abs() <= CURVE_TOL * curve {
            return Ok(RegimeRegion::Boundary(name));
        }
        if nu > curve {
            return Ok(region);
        }
    }
    Ok(RegimeRegion::IV)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caption_points() {
        assert_eq!(classify_regime(0.01, 1e-4).unwrap(), RegimeRegion::Boundary("III/IV"));
        assert_eq!(classify_regime(0.01, 1e-3).unwrap(), RegimeRegion::III);
        assert_eq!(classify_regime(0.01, 0.1).unwrap(), RegimeRegion::I);
        assert_eq!(classify_regime(0.01, 0.02).unwrap(), RegimeRegion::II);
        assert_eq!(classify_regime(0.01, 1e-5).unwrap(), RegimeRegion::IV);
        assert_eq!(
            classify_regime(0.008, 0.008f64.powf(2.0 / 3.0)).unwrap(),
            RegimeRegion::Boundary("I/II")
        );
        assert_eq!(classify_regime(0.01, 1e-4).unwrap().to_string(), "boundary III/IV");
        for bad in [(0.0, 0.1), (1.0, 0.1), (0.1, 0.0), (0.1, 1.5), (f64::NAN, 0.1)] {
            assert!(classify_regime(bad.0, bad.1).is_err());
        }
    }

    #[test]
    fn labels_round_trip() {
        for l in ["I", "II", "III", "IV", "I/II", "II/III", "III/IV"] {
            assert_eq!(RegimeRegion::from_label(l).unwrap().label(), l);
        }
        assert!(RegimeRegion::from_label("V").is_none());
    }
}
