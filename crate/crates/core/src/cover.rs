//! The Post cover of a finite polyadic group and polyadic presentations.
//!
//! For `P = der_{θ,b}(G)` the cover lives on `G × Z_{n−1}` with
//! `(x,i)(y,j) = (x·θ^i(y)·b^{⌊(i+j)/(n−1)⌋}, (i+j) mod (n−1))`. The pair
//! `(x,i)` has index `i·|G| + x`, so the normal subgroup `R = {(g,0)}` is
//! `0..|G|` and `G` embeds as `g ↦ (g,1)`.

use std::collections::VecDeque;

use crate::group::{are_isomorphic, FiniteGroup, Hom};
use crate::polyadic::{retract, NaryOperation, PolyadicError, PolyadicGroup};
use crate::terms::PolyadicTerm;
use crate::words::{FreeWord, Symbol};
use crate::{checked_pow, decode_tuple, CapExceeded, Elem, Limits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("cover property {property} fails: {witness}")]
    PropertyFailure { property: u8, witness: String },
    #[error("map is not a polyadic homomorphism into der(H): fails at {tuple:?}")]
    NotPolyadicHom { tuple: Vec<Elem> },
    #[error("extension is inconsistent at cover element {element}: {first} vs {second}")]
    Inconsistent { element: Elem, first: Elem, second: Elem },
    #[error("map has {got} images, carrier has {expected} elements")]
    WrongImageCount { expected: usize, got: usize },
    #[error("presentation has no generators")]
    EmptyGeneratorSet,
    #[error("relation {0} has constants; presentations must be coefficient-free")]
    NotCoefficientFree(usize),
    #[error("relation {index} uses variable {var} but there are {count} generators")]
    UnknownGenerator { index: usize, var: usize, count: usize },
    #[error(transparent)]
    Polyadic(#[from] PolyadicError),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

#[derive(Debug, Clone)]
pub struct PostCover {
    group: FiniteGroup,
    base_order: usize,
    arity: usize,
}

impl PostCover {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn base_order(&self) -> usize {
        self.base_order
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Index of `(x, grade)`.
    pub fn element(&self, x: Elem, grade: usize) -> Elem {
        grade * self.base_order + x
    }

    /// `g ↦ (g, 1)`.
    pub fn embed(&self, g: Elem) -> Elem {
        self.element(g, 1)
    }

    pub fn grade(&self, c: Elem) -> usize {
        c / self.base_order
    }

    pub fn component(&self, c: Elem) -> Elem {
        c % self.base_order
    }

    /// `R = {(g, 0)}`.
    pub fn kernel(&self) -> Vec<Elem> {
        (0..self.base_order).collect()
    }

    pub fn embedded_coset(&self) -> Vec<Elem> {
        (0..self.base_order).map(|g| self.embed(g)).collect()
    }
}

/// Builds the cover and machine-checks group validity and the five cover properties.
pub fn build_post_cover(p: &PolyadicGroup, limits: &Limits) -> Result<PostCover, CoverError> {
    let n = p.arity();
    let d = p.derivation()?;
    let g = &d.group;
    let m = g.order();
    let k = n - 1;
    CapExceeded::check("cover table cells", ((k * m) * (k * m)) as u128, limits.max_table_cells)?;
    let theta_powers: Vec<_> = (0..k).map(|i| d.theta.pow(i)).collect();
    let b_powers: Vec<Elem> = (0..2).map(|e| g.pow(d.b, e)).collect();
    let names = (0..k)
        .flat_map(|i| g.elements().map(move |x| (x, i)))
        .map(|(x, i)| format!("({},{})", g.name(x), i))
        .collect();
    let group = FiniteGroup::from_fn(names, |c1, c2| {
        let (x, i) = (c1 % m, c1 / m);
        let (y, j) = (c2 % m, c2 / m);
        let carry = (i + j) / k;
        let z = g.mul(g.mul(x, theta_powers[i].apply(y)), b_powers[carry]);
        ((i + j) % k) * m + z
    })
    .map_err(|e| CoverError::PropertyFailure { property: 0, witness: format!("not a group: {e}") })?;
    let cover = PostCover { group, base_order: m, arity: n };
    check_properties(&cover, p, limits)?;
    Ok(cover)
}

fn fail(property: u8, witness: String) -> CoverError {
    CoverError::PropertyFailure { property, witness }
}

fn check_properties(cover: &PostCover, p: &PolyadicGroup, limits: &Limits) -> Result<(), CoverError> {
    let c = &cover.group;
    let m = cover.base_order;
    let k = cover.arity - 1;
    if c.order() != k * m {
        return Err(fail(0, format!("order {} != {}", c.order(), k * m)));
    }

    // R is a normal subgroup, and G sits in the cover as the coset R·(e,1).
    let e1 = cover.element(c.identity() % m, 1);
    let mut coset: Vec<Elem> = cover.kernel().iter().map(|&r| c.mul(r, e1)).collect();
    coset.sort_unstable();
    if coset != cover.embedded_coset() {
        return Err(fail(1, "R·(e,1) differs from the embedded copy of G".into()));
    }
    for r in cover.kernel() {
        for x in c.elements() {
            let conj = c.mul(c.mul(x, r), c.inv(x));
            if cover.grade(conj) != 0 {
                return Err(fail(1, format!("R is not normal: conjugating {r} by {x}")));
            }
        }
    }

    let kernel = c.subgroup(&cover.kernel()).map_err(|e| fail(2, format!("R is not a subgroup: {e}")))?;
    let ret = retract(p, 0)?;
    if are_isomorphic(&kernel, &ret, limits)?.is_none() {
        return Err(fail(2, "R is not isomorphic to the retract".into()));
    }

    for x in c.elements() {
        for y in c.elements() {
            if cover.grade(c.mul(x, y)) != (cover.grade(x) + cover.grade(y)) % k {
                return Err(fail(3, format!("grade map is not a homomorphism at ({x},{y})")));
            }
        }
    }

    let n = cover.arity;
    let total = checked_pow(m, n);
    CapExceeded::check("cover product tuples", total, limits.max_tuples)?;
    let mut tuple = vec![0; n];
    for t in 0..total as usize {
        decode_tuple(t, m, &mut tuple);
        let prod = tuple.iter().fold(c.identity(), |acc, &x| c.mul(acc, cover.embed(x)));
        if prod != cover.embed(p.apply(&tuple)) {
            return Err(fail(4, format!("product of embeddings differs from f at {tuple:?}")));
        }
    }

    if c.generate(&cover.embedded_coset()).len() != c.order() {
        return Err(fail(5, "embedded copy of G does not generate".into()));
    }
    Ok(())
}

/// The unique homomorphism `h` of the cover with `h(g,1) = β(g)`, for a polyadic
/// homomorphism `β: P → der^n(H)`.
pub fn extend_hom_to_cover(
    cover: &PostCover,
    p: &PolyadicGroup,
    beta: &[Elem],
    h: &FiniteGroup,
    limits: &Limits,
) -> Result<Hom, CoverError> {
    let m = cover.base_order;
    if beta.len() != m {
        return Err(CoverError::WrongImageCount { expected: m, got: beta.len() });
    }
    if let Some(&y) = beta.iter().find(|&&y| y >= h.order()) {
        return Err(CoverError::Polyadic(PolyadicError::ElementOutOfRange { element: y, order: h.order() }));
    }
    let n = cover.arity;
    let total = checked_pow(m, n);
    CapExceeded::check("homomorphism check tuples", total, limits.max_tuples)?;
    let mut tuple = vec![0; n];
    for t in 0..total as usize {
        decode_tuple(t, m, &mut tuple);
        let prod = tuple.iter().fold(h.identity(), |acc, &x| h.mul(acc, beta[x]));
        if beta[p.apply(&tuple)] != prod {
            return Err(CoverError::NotPolyadicHom { tuple: tuple.clone() });
        }
    }

    let c = &cover.group;
    let mut image: Vec<Option<Elem>> = vec![None; c.order()];
    let mut queue = VecDeque::new();
    for g in 0..m {
        image[cover.embed(g)] = Some(beta[g]);
        queue.push_back(cover.embed(g));
    }
    while let Some(x) = queue.pop_front() {
        let hx = image[x].expect("queued elements are assigned");
        for g in 0..m {
            let y = c.mul(x, cover.embed(g));
            let hy = h.mul(hx, beta[g]);
            match image[y] {
                Some(prev) if prev != hy => {
                    return Err(CoverError::Inconsistent { element: y, first: prev, second: hy })
                }
                Some(_) => {}
                None => {
                    image[y] = Some(hy);
                    queue.push_back(y);
                }
            }
        }
    }
    let images: Vec<Elem> = image.into_iter().map(|v| v.expect("embedded coset generates")).collect();
    for x in c.elements() {
        for y in c.elements() {
            let lhs = images[c.mul(x, y)];
            let rhs = h.mul(images[x], images[y]);
            if lhs != rhs {
                return Err(CoverError::Inconsistent { element: c.mul(x, y), first: lhs, second: rhs });
            }
        }
    }
    Ok(Hom::from_images_unchecked(images))
}

/// `⟨X | R⟩` for ordinary groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<Symbol>,
    pub relators: Vec<FreeWord>,
}

/// `⟨X | R⟩_pol`: relations between coefficient-free terms; `Var(i)` is the `i`-th generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyadicPresentation {
    pub generators: Vec<Symbol>,
    pub relations: Vec<(PolyadicTerm, PolyadicTerm)>,
}

impl PolyadicPresentation {
    /// Parses relations `t = t` whose identifiers are generator names.
    pub fn parse(generators: &[&str], relations: &[&str], arity: usize) -> Result<Self, crate::ParseError> {
        let gens: Vec<Symbol> = generators.iter().map(|g| Symbol::new(g)).collect();
        let resolve = |name: &str, _bracketed: bool| gens.iter().position(|g| g.as_str() == name).map(PolyadicTerm::Var);
        let relations = relations
            .iter()
            .enumerate()
            .map(|(i, r)| {
                crate::terms::Equation::parse_with(r, arity, &resolve)
                    .map(|e| (e.left, e.right))
                    .map_err(|e| e.offset_lines(i))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { generators: gens, relations })
    }
}

/// Result of [`presentation_to_group`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverPresentation {
    pub presentation: GroupPresentation,
    /// Each relator, inverted when its height is negative.
    pub positive_forms: Vec<FreeWord>,
}

/// The flattening `f ↦` concatenation, skew `↦` power `2−n`, into the free group.
pub fn term_to_word(t: &PolyadicTerm, generators: &[Symbol], arity: usize) -> Option<FreeWord> {
    Some(match t {
        PolyadicTerm::Var(i) => FreeWord::power_of(generators.get(*i)?.clone(), 1),
        PolyadicTerm::Const(_) => return None,
        PolyadicTerm::Apply(ts) => {
            let words = ts.iter().map(|s| term_to_word(s, generators, arity)).collect::<Option<Vec<_>>>()?;
            FreeWord::concat(&words)
        }
        PolyadicTerm::Skew(s) => term_to_word(s, generators, arity)?.pow(2 - arity as i64),
    })
}

/// A presentation of the Post cover: relators `u·v⁻¹` over the same generators.
pub fn presentation_to_group(pres: &PolyadicPresentation, arity: usize) -> Result<CoverPresentation, CoverError> {
    if pres.generators.is_empty() {
        return Err(CoverError::EmptyGeneratorSet);
    }
    let mut relators = Vec::new();
    for (i, (u, v)) in pres.relations.iter().enumerate() {
        if !u.is_coefficient_free() || !v.is_coefficient_free() {
            return Err(CoverError::NotCoefficientFree(i));
        }
        if let Some(var) = u.max_var().max(v.max_var()).filter(|&x| x >= pres.generators.len()) {
            return Err(CoverError::UnknownGenerator { index: i, var, count: pres.generators.len() });
        }
        let uw = term_to_word(u, &pres.generators, arity).expect("checked above");
        let vw = term_to_word(v, &pres.generators, arity).expect("checked above");
        relators.push(uw.mul(&vw.inverse()));
    }
    let positive_forms = relators.iter().map(|r| if r.height() < 0 { r.inverse() } else { r.clone() }).collect();
    Ok(CoverPresentation {
        presentation: GroupPresentation { generators: pres.generators.clone(), relators },
        positive_forms,
    })
}
