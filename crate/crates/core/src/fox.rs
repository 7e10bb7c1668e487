//! Fox free differential calculus on the free group of rank two.

use crate::error::Result;
use crate::freegroup::{build_w, Gen, GroupRingElt, Word};
use crate::sl2::KnotParams;

/// `du/dg` with the left product rule `d(uv) = du + u dv`.
pub fn fox_derivative(u: &Word, g: Gen) -> GroupRingElt {
    let mut out = GroupRingElt::zero();
    let mut prefix = Word::identity();
    for (h, e) in u.letters() {
        let letter = Word::from_syllables([(h, e)]);
        if h == g {
            if e > 0 {
                out.add_term(prefix.clone(), 1);
            } else {
                out.add_term(prefix.concat(&letter), -1);
            }
        }
        prefix = prefix.concat(&letter);
    }
    out
}

/// `1 + u + ... + u^p`, extended to negative `p` so that
/// `(1 - u) delta_p(u) = 1 - u^(p+1)` always holds.
pub fn delta_p(u: &Word, p: i64) -> GroupRingElt {
    let mut out = GroupRingElt::zero();
    if p >= 0 {
        for i in 0..=p {
            out.add_term(u.pow(i), 1);
        }
    } else {
        for i in 1..-p {
            out.add_term(u.pow(-i), -1);
        }
    }
    out
}

/// `w^n [1 + (1 - a) delta_{n-1}(w^-1) (a^-1 b)^m (b^-1 - 1) delta_{m-1}(a b^-1)]`.
pub fn relator_derivative_closed(params: KnotParams) -> Result<GroupRingElt> {
    let (m, n) = (params.m, params.n);
    let w = build_w(m)?;
    let a = Word::a();
    let b = Word::b();
    let one = GroupRingElt::one();

    let one_minus_a = &one - &GroupRingElt::word(a.clone());
    let d_w = delta_p(&w.inverse(), n - 1);
    let ainv_b = GroupRingElt::word(a.inverse().concat(&b).pow(m));
    let binv_minus_one = &GroupRingElt::word(b.inverse()) - &one;
    let d_ab = delta_p(&a.concat(&b.inverse()), m - 1);

    let inner = &(&(&(&one_minus_a * &d_w) * &ainv_b) * &binv_minus_one) * &d_ab;
    Ok((&one + &inner).mul_word_left(&w.pow(n)))
}
