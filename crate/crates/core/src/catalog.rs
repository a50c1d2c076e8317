//! Small named groups and the standard polyadic examples.

use crate::group::{Automorphism, FiniteGroup};
use crate::polyadic::{PolyadicError, PolyadicGroup};
use crate::{Elem, Limits};

/// `Z_n` with elements named `0..n`.
pub fn cyclic(n: usize) -> FiniteGroup {
    assert!(n > 0, "cyclic group of order 0");
    FiniteGroup::from_fn((0..n).map(|i| i.to_string()).collect(), |x, y| (x + y) % n)
        .expect("cyclic table is a group")
}

/// Direct product `A × B`; `(a, b)` has index `a·|B| + b` and name `(a,b)`.
pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    let nb = b.order();
    let names = a
        .elements()
        .flat_map(|x| b.elements().map(move |y| (x, y)))
        .map(|(x, y)| format!("({},{})", a.name(x), b.name(y)))
        .collect();
    FiniteGroup::from_fn(names, |x, y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
        .expect("direct product is a group")
}

/// `Z_2 × Z_2`.
pub fn klein() -> FiniteGroup {
    product(&cyclic(2), &cyclic(2))
}

const S3_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
const S3_NAMES: [&str; 6] = ["e", "(12)", "(13)", "(23)", "(123)", "(132)"];

/// `S_3` as permutations of `{1,2,3}`, composed right to left.
pub fn symmetric3() -> FiniteGroup {
    let index = |p: [usize; 3]| S3_PERMS.iter().position(|q| *q == p).expect("closed");
    FiniteGroup::from_fn(S3_NAMES.iter().map(|s| s.to_string()).collect(), |x, y| {
        let (s, t) = (S3_PERMS[x], S3_PERMS[y]);
        index([s[t[0]], s[t[1]], s[t[2]]])
    })
    .expect("S3 is a group")
}

fn negation(n: usize) -> Automorphism {
    let g = cyclic(n);
    Automorphism::new(&g, (0..n).map(|x| (n - x) % n).collect()).expect("negation is an automorphism")
}

fn derive(g: FiniteGroup, theta: Automorphism, b: Elem, n: usize) -> PolyadicGroup {
    PolyadicGroup::derive(g, theta, b, n, &Limits::default()).expect("catalog instance is valid")
}

/// `der(Z_3, id, 0, 3)`: `f(x,y,z) = x+y+z`.
pub fn z3_identity() -> PolyadicGroup {
    let g = cyclic(3);
    let id = Automorphism::identity(&g);
    derive(g, id, 0, 3)
}

/// `der(Z_3, x ↦ 2x, 0, 3)`: `f(x,y,z) = x+2y+z`.
pub fn z3_negation() -> PolyadicGroup {
    derive(cyclic(3), negation(3), 0, 3)
}

/// `der(Z_4, x ↦ −x, b, 3)`.
pub fn z4_negation(b: Elem) -> PolyadicGroup {
    derive(cyclic(4), negation(4), b, 3)
}

/// `der(Z_2×Z_2, id, (1,1), 4)`.
pub fn klein_b11() -> PolyadicGroup {
    let g = klein();
    let b = g.index_of("(1,1)").expect("named element");
    let id = Automorphism::identity(&g);
    derive(g, id, b, 4)
}

/// `der(S_3, conjugation by (12), (12), n)`; valid only when `n` is even.
pub fn s3_inner(n: usize) -> Result<PolyadicGroup, PolyadicError> {
    let g = symmetric3();
    let t = g.index_of("(12)").expect("named element");
    let theta = Automorphism::inner(&g, t);
    PolyadicGroup::derive(g, theta, t, n, &Limits::default())
}

/// The six-entry standard list; the `S_3` entry at arity 3 is rejected by `derive`.
pub fn standard() -> Vec<(&'static str, Result<PolyadicGroup, PolyadicError>)> {
    vec![
        ("der(Z3,id,0,3)", Ok(z3_identity())),
        ("der(Z3,2x,0,3)", Ok(z3_negation())),
        ("der(Z4,-x,0,3)", Ok(z4_negation(0))),
        ("der(Z4,-x,2,3)", Ok(z4_negation(2))),
        ("der(Z2xZ2,id,(1,1),4)", Ok(klein_b11())),
        ("der(S3,inner(12),(12),3)", s3_inner(3)),
    ]
}

/// The standard list with the `S_3` entry taken at arity 4.
pub fn constructible() -> Vec<(&'static str, PolyadicGroup)> {
    vec![
        ("der(Z3,id,0,3)", z3_identity()),
        ("der(Z3,2x,0,3)", z3_negation()),
        ("der(Z4,-x,0,3)", z4_negation(0)),
        ("der(Z4,-x,2,3)", z4_negation(2)),
        ("der(Z2xZ2,id,(1,1),4)", klein_b11()),
        ("der(S3,inner(12),(12),4)", s3_inner(4).expect("valid at arity 4")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyadic::PolyadicError;

    #[test]
    fn s3_is_nonabelian_of_order_6() {
        let s3 = symmetric3();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
        let t = s3.index_of("(12)").unwrap();
        let c = s3.index_of("(123)").unwrap();
        assert_eq!(s3.element_order(t), 2);
        assert_eq!(s3.element_order(c), 3);
    }

    #[test]
    fn klein_names() {
        let k = klein();
        assert_eq!(k.names(), &["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        assert!(k.elements().all(|x| k.mul(x, x) == 0));
    }

    #[test]
    fn s3_arity_three_is_rejected() {
        assert!(matches!(s3_inner(3), Err(PolyadicError::ConditionTwoFails { .. })));
        assert!(s3_inner(4).is_ok());
        assert!(s3_inner(6).is_ok());
    }
}
