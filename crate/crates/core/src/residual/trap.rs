use serde::{Deserialize, Serialize};

use crate::amalgam::Amalgam;
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `a^w = [a^u, a^v]` with `x^y = y^-1*x*y`
    AsStated,
    /// holds only with every conjugation read as `y*x*y^-1`
    Inverted,
}

/// Evidence that `a` lies in every term of the derived series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapCertificate {
    pub group: String,
    pub element: String,
    pub w: String,
    pub u: String,
    pub v: String,
    pub orientation: Orientation,
    pub lhs: String,
    pub rhs: String,
    /// `a = 1`: the identity holds but proves nothing
    pub degenerate: bool,
    pub deductions: Vec<String>,
}

impl TrapCertificate {
    pub fn verified(&self) -> bool {
        !self.degenerate
    }
}

/// Check `a^w = [a^u, a^v]` in the amalgam, trying the inverse conjugation
/// convention if the stated one fails.
pub fn trap_certificate(g: &Amalgam, a: &Word, w: &Word, u: &Word, v: &Word) -> Result<TrapCertificate> {
    let x = g.normal_form(a);
    let side = |w: &Word, u: &Word, v: &Word| {
        let lhs = g.normal_form(&a.conjugate(w));
        let rhs = g.normal_form(&Word::commutator(&a.conjugate(u), &a.conjugate(v)));
        (lhs, rhs)
    };
    let (l1, r1) = side(w, u, v);
    let (orientation, lhs, rhs) = if l1 == r1 {
        (Orientation::AsStated, l1, r1)
    } else {
        let (l2, r2) = side(&w.inverse(), &u.inverse(), &v.inverse());
        if l2 != r2 {
            return Err(Error::IdentityFails(format!(
                "a^w = {} but [a^u, a^v] = {}",
                g.fmt_elem(&l1),
                g.fmt_elem(&r1)
            )));
        }
        (Orientation::Inverted, l2, r2)
    };
    let names = g.letters();
    let degenerate = g.is_identity(&x);
    let deductions = if degenerate {
        vec![]
    } else {
        vec![
            "the normal closure N of a satisfies N = [N, N]".into(),
            "a lies in every term of the derived series".into(),
            format!("{} is not residually solvable", g.name()),
            format!("{} is not poly-(residually solvable)", g.name()),
        ]
    };
    Ok(TrapCertificate {
        group: g.name().to_string(),
        element: a.display(names).to_string(),
        w: w.display(names).to_string(),
        u: u.display(names).to_string(),
        v: v.display(names).to_string(),
        orientation,
        lhs: g.fmt_elem(&lhs),
        rhs: g.fmt_elem(&rhs),
        degenerate,
        deductions,
    })
}
