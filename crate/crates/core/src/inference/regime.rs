use serde::{Deserialize, Serialize};

use crate::error::{DcovError, Result};

/// Analyst-supplied finiteness facts about a pair of laws.
///
/// Tail finiteness cannot be inferred from data, so these are inputs. The
/// classifier checks that they are mutually consistent but does not second
/// guess them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentFlags {
    pub beta: f64,
    /// E‖X‖^β < ∞
    pub x_beta: bool,
    pub y_beta: bool,
    /// E[‖X‖^β ‖Y‖^β] < ∞
    pub xy_product: bool,
    /// E‖X‖^{2β} < ∞
    pub x_2beta: bool,
    pub y_2beta: bool,
    /// The four-point alternating kernel of X is integrable.
    pub hx_l1: bool,
    pub hx_l2: bool,
    pub hy_l1: bool,
    pub hy_l2: bool,
    /// Y is the same variable as X.
    #[serde(default)]
    pub y_equals_x: bool,
}

impl MomentFlags {
    /// Flags for a pair with every moment finite.
    pub fn all_finite(beta: f64) -> Self {
        MomentFlags {
            beta,
            x_beta: true,
            y_beta: true,
            xy_product: true,
            x_2beta: true,
            y_2beta: true,
            hx_l1: true,
            hx_l2: true,
            hy_l1: true,
            hy_l2: true,
            y_equals_x: false,
        }
    }

    /// Flags for Y = X built from the X-side facts only.
    pub fn diagonal(beta: f64, x_beta: bool, x_2beta: bool, hx_l1: bool, hx_l2: bool) -> Self {
        MomentFlags {
            beta,
            x_beta,
            y_beta: x_beta,
            xy_product: x_2beta,
            x_2beta,
            y_2beta: x_2beta,
            hx_l1,
            hx_l2,
            hy_l1: hx_l1,
            hy_l2: hx_l2,
            y_equals_x: true,
        }
    }

    /// Rejects flag sets that contradict the implications between the
    /// moment conditions.
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(DcovError::InconsistentFlags(m.to_string()));
        if !(self.beta.is_finite() && self.beta > 0.0 && self.beta <= 2.0) {
            return Err(DcovError::BetaOutOfRange { beta: self.beta, range: "(0, 2]" });
        }
        for (side, m1, m2, l1, l2) in [
            ("x", self.x_beta, self.x_2beta, self.hx_l1, self.hx_l2),
            ("y", self.y_beta, self.y_2beta, self.hy_l1, self.hy_l2),
        ] {
            if m2 && !m1 {
                return bad(&format!("{side}: 2β-moment finite but β-moment infinite"));
            }
            if l2 && !l1 {
                return bad(&format!("{side}: kernel in L² but not in L¹"));
            }
            if m1 && !l1 {
                return bad(&format!("{side}: β-moment finite forces the kernel into L¹"));
            }
            if m1 && !l2 {
                return bad(&format!("{side}: β-moment finite with β ≤ 2 forces the kernel into L²"));
            }
            if m2 && !l2 {
                return bad(&format!("{side}: 2β-moment finite forces the kernel into L²"));
            }
        }
        if self.x_2beta && self.y_2beta && !self.xy_product {
            return bad("both 2β-moments finite force the product moment finite");
        }
        if self.y_equals_x {
            let same = self.x_beta == self.y_beta
                && self.x_2beta == self.y_2beta
                && self.hx_l1 == self.hy_l1
                && self.hx_l2 == self.hy_l2
                && self.xy_product == self.x_2beta;
            if !same {
                return bad("y_equals_x set but x and y flags differ");
            }
        }
        Ok(())
    }

    /// Sum condition under which the three-expectation form is finite.
    pub fn sum_condition(&self) -> bool {
        self.x_beta && self.y_beta && self.xy_product
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definition {
    D1,
    D2,
    D3,
    D4,
    D5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Finite,
    PlusInfinity,
    /// Of the form ∞ − ∞.
    Undefined,
    /// The centered kernel itself does not exist.
    TildeUndefined,
    /// Not settled by the known results.
    Unknown,
    /// The definition does not apply at this exponent.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub d1: Status,
    pub d2: Status,
    pub d3: Status,
    pub d4: Status,
    pub d5: Status,
    /// Definitions known to give the same value.
    pub agree: Vec<Definition>,
    pub notes: Vec<String>,
}

impl RegimeReport {
    pub fn status(&self, d: Definition) -> Status {
        match d {
            Definition::D1 => self.d1,
            Definition::D2 => self.d2,
            Definition::D3 => self.d3,
            Definition::D4 => self.d4,
            Definition::D5 => self.d5,
        }
    }
}

/// Classifies each definition as finite, infinite, undefined or unknown.
/// Marginals are assumed non-degenerate.
pub fn regime_classify(flags: &MomentFlags) -> Result<RegimeReport> {
    flags.check()?;
    let f = flags;
    let sum = f.sum_condition();
    let both_l2 = f.hx_l2 && f.hy_l2;
    let both_l1 = f.hx_l1 && f.hy_l1;
    let both_beta = f.x_beta && f.y_beta;
    let mut notes = Vec::new();

    let d1 = if sum { Status::Finite } else { Status::Undefined };

    let d2 = if both_l2 || sum {
        Status::Finite
    } else if f.y_equals_x {
        Status::PlusInfinity
    } else {
        notes.push("d2: sign and finiteness not settled without square-integrable kernels".into());
        Status::Unknown
    };

    let d3 = if !both_l1 {
        Status::TildeUndefined
    } else if both_l2 || sum {
        Status::Finite
    } else if f.y_equals_x {
        Status::PlusInfinity
    } else {
        notes.push("d3: finiteness not settled with integrable but not square-integrable kernels".into());
        Status::Unknown
    };

    let (d4, d5) = if f.beta >= 2.0 {
        (Status::NotApplicable, Status::NotApplicable)
    } else if both_beta {
        (Status::Finite, Status::Finite)
    } else {
        notes.push("d4/d5: integral forms not settled without β-moments".into());
        (Status::Unknown, Status::Unknown)
    };

    let mut agree = Vec::new();
    if sum {
        agree.extend([Definition::D1, Definition::D2, Definition::D3]);
        if f.beta < 2.0 {
            agree.extend([Definition::D4, Definition::D5]);
        }
    } else if both_beta && f.beta < 2.0 {
        agree.extend([Definition::D2, Definition::D3, Definition::D4, Definition::D5]);
    } else if both_l2 || (f.y_equals_x && f.hx_l1) {
        agree.extend([Definition::D2, Definition::D3]);
    }
    if d1 == Status::Undefined {
        notes.push("d1: expectations are of the form ∞ − ∞".into());
    }
    if !both_l1 {
        notes.push("d3: centered kernel not integrable, so it does not exist".into());
    }
    Ok(RegimeReport { d1, d2, d3, d4, d5, agree, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_flag_sets(beta: f64) -> Vec<MomentFlags> {
        (0u32..1 << 10)
            .map(|m| {
                let b = |i: u32| m >> i & 1 == 1;
                MomentFlags {
                    beta,
                    x_beta: b(0),
                    y_beta: b(1),
                    xy_product: b(2),
                    x_2beta: b(3),
                    y_2beta: b(4),
                    hx_l1: b(5),
                    hx_l2: b(6),
                    hy_l1: b(7),
                    hy_l2: b(8),
                    y_equals_x: b(9),
                }
            })
            .filter(|f| f.check().is_ok())
            .collect()
    }

    fn rank(s: Status) -> u8 {
        // Higher is "better behaved" for monotonicity checks.
        match s {
            Status::Finite => 2,
            _ => 0,
        }
    }

    #[test]
    fn all_finite_agree() {
        let r = regime_classify(&MomentFlags::all_finite(1.0)).unwrap();
        assert_eq!(r.d1, Status::Finite);
        assert_eq!(r.d2, Status::Finite);
        assert_eq!(r.d3, Status::Finite);
        assert_eq!(r.agree, vec![Definition::D1, Definition::D2, Definition::D3, Definition::D4, Definition::D5]);
    }

    #[test]
    fn diagonal_cases() {
        let r = regime_classify(&MomentFlags::diagonal(1.0, true, false, true, true)).unwrap();
        assert_eq!(r.d1, Status::Undefined);
        assert_eq!(r.d2, Status::Finite);
        let r = regime_classify(&MomentFlags::diagonal(2.0, false, false, true, false)).unwrap();
        assert_eq!(r.d2, Status::PlusInfinity);
        assert_eq!(r.d3, Status::PlusInfinity);
        assert_eq!(r.d4, Status::NotApplicable);
        let r = regime_classify(&MomentFlags::diagonal(1.5, false, false, false, false)).unwrap();
        assert_eq!(r.d2, Status::PlusInfinity);
        assert_eq!(r.d3, Status::TildeUndefined);
    }

    #[test]
    fn inconsistent_rejected() {
        let mut f = MomentFlags::all_finite(1.0);
        f.x_beta = false;
        assert!(matches!(regime_classify(&f), Err(DcovError::InconsistentFlags(_))));
        let mut f = MomentFlags::all_finite(1.0);
        f.xy_product = false;
        assert!(regime_classify(&f).is_err());
        let mut f = MomentFlags::diagonal(1.0, true, true, true, true);
        f.y_2beta = false;
        f.y_beta = true;
        assert!(regime_classify(&f).is_err());
    }

    #[test]
    fn d1_never_infinite_and_lattice_holds() {
        for beta in [0.5, 1.0, 1.5, 2.0] {
            for f in all_flag_sets(beta) {
                let r = regime_classify(&f).unwrap();
                assert!(matches!(r.d1, Status::Finite | Status::Undefined));
                if f.x_2beta && f.y_2beta {
                    assert_eq!(r.d1, Status::Finite);
                }
                if r.d1 == Status::Finite {
                    assert!(f.x_beta && f.y_beta);
                    assert_eq!(r.d2, Status::Finite);
                    assert_eq!(r.d3, Status::Finite);
                }
                if r.d3 != Status::TildeUndefined {
                    assert!(f.hx_l1 && f.hy_l1);
                }
                if f.y_equals_x {
                    assert_eq!(r.d2 == Status::Finite, f.hx_l2);
                    assert_ne!(r.d2, Status::Unknown);
                }
            }
        }
    }

    #[test]
    fn monotone_in_flags() {
        // Turning on one more flag never makes a finite definition non-finite.
        for beta in [0.5, 1.0, 2.0] {
            let sets = all_flag_sets(beta);
            let bits = |f: &MomentFlags| {
                [f.x_beta, f.y_beta, f.xy_product, f.x_2beta, f.y_2beta, f.hx_l1, f.hx_l2, f.hy_l1, f.hy_l2]
            };
            for a in &sets {
                for b in &sets {
                    if a.y_equals_x != b.y_equals_x {
                        continue;
                    }
                    let (ba, bb) = (bits(a), bits(b));
                    if ba.iter().zip(&bb).all(|(x, y)| !x || *y) {
                        let (ra, rb) = (regime_classify(a).unwrap(), regime_classify(b).unwrap());
                        for d in [Definition::D1, Definition::D2, Definition::D3, Definition::D4, Definition::D5] {
                            assert!(rank(rb.status(d)) >= rank(ra.status(d)));
                        }
                    }
                }
            }
        }
    }
}
