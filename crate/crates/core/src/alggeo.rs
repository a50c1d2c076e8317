//! Algebraic geometry over a finite polyadic group.
//!
//! Radicals are handled through term functions: two terms are equivalent modulo
//! `Rad(Y)` exactly when they define the same function on `Y`. The coordinate
//! group `Γ(Y)` is therefore realized inside the direct power `G^{|Y|}` as the
//! subalgebra generated by the projections (and, with coefficients, the
//! diagonal constants).

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::cover::{build_post_cover, CoverError, PostCover};
use crate::group::{Automorphism, FiniteGroup, GroupError};
use crate::lex::ParseError;
use crate::polyadic::{NaryOperation, PolyadicError, PolyadicGroup};
use crate::terms::{eval_group_term, eval_term, polyadic_equation_to_group, Equation, PolyadicTerm, TermError};
use crate::{checked_pow, decode_tuple, encode_tuple, CapExceeded, Elem, Limits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgGeoError {
    #[error("equation {index} uses x{} but the system has {vars} variables", .var + 1)]
    VariableOutOfRange { index: usize, var: usize, vars: usize },
    #[error("equation {0} has constants; a coefficient-free system is required")]
    NotCoefficientFree(usize),
    #[error("point {0:?} is not in G^m")]
    BadPoint(Vec<Elem>),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Polyadic(#[from] PolyadicError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// A finite system of equations in `m` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub vars: usize,
    pub equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn new(vars: usize, equations: Vec<Equation>) -> Result<Self, AlgGeoError> {
        for (index, e) in equations.iter().enumerate() {
            if let Some(var) = e.max_var().filter(|&v| v >= vars) {
                return Err(AlgGeoError::VariableOutOfRange { index, var, vars });
            }
        }
        Ok(Self { vars, equations })
    }

    /// One equation per line; blank lines and `#` comments are skipped.
    pub fn parse(src: &str, vars: usize, p: &impl NaryOperation) -> Result<Self, AlgGeoError> {
        let mut equations = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let text = line.split('#').next().unwrap_or("");
            if text.trim().is_empty() {
                continue;
            }
            equations.push(Equation::parse(text, p).map_err(|e| e.offset_lines(i))?);
        }
        Self::new(vars, equations)
    }

    pub fn is_coefficient_free(&self) -> bool {
        self.equations.iter().all(Equation::is_coefficient_free)
    }

    pub fn union(&self, other: &EquationSystem) -> EquationSystem {
        let mut equations = self.equations.clone();
        equations.extend(other.equations.iter().cloned());
        EquationSystem { vars: self.vars.max(other.vars), equations }
    }
}

/// An explicit subset of `G^m`, sorted lexicographically without repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicSet {
    pub vars: usize,
    pub points: Vec<Vec<Elem>>,
}

impl AlgebraicSet {
    pub fn from_points(vars: usize, mut points: Vec<Vec<Elem>>) -> Self {
        points.sort();
        points.dedup();
        Self { vars, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: &[Elem]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(point)).is_ok()
    }

    pub fn is_subset(&self, other: &AlgebraicSet) -> bool {
        self.points.iter().all(|q| other.contains(q))
    }

    pub fn intersection(&self, other: &AlgebraicSet) -> AlgebraicSet {
        let points = self.points.iter().filter(|q| other.contains(q)).cloned().collect();
        AlgebraicSet { vars: self.vars, points }
    }

    pub fn union(&self, other: &AlgebraicSet) -> AlgebraicSet {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        AlgebraicSet::from_points(self.vars, points)
    }
}

/// All of `G^m`, in lexicographic order.
pub fn full_space(order: usize, vars: usize, limits: &Limits) -> Result<AlgebraicSet, CapExceeded> {
    let total = checked_pow(order, vars);
    CapExceeded::check("points of G^m", total, limits.max_power_order)?;
    let points = (0..total as usize)
        .map(|i| {
            let mut q = vec![0; vars];
            decode_tuple(i, order, &mut q);
            q
        })
        .collect();
    Ok(AlgebraicSet { vars, points })
}

fn check_terms(p: &impl NaryOperation, s: &EquationSystem) -> Result<(), AlgGeoError> {
    let probe = vec![0; s.vars];
    for e in &s.equations {
        e.holds_at(&probe, p)?;
    }
    Ok(())
}

/// `V_G(S)` by exhaustive enumeration of `G^m`.
pub fn solve(p: &impl NaryOperation, s: &EquationSystem, limits: &Limits) -> Result<AlgebraicSet, AlgGeoError> {
    let total = checked_pow(p.order(), s.vars);
    CapExceeded::check("points of G^m", total, limits.max_power_order)?;
    if total > 0 && !s.equations.is_empty() {
        check_terms(p, s)?;
    }
    let points = (0..total as usize)
        .into_par_iter()
        .filter_map(|i| {
            let mut q = vec![0; s.vars];
            decode_tuple(i, p.order(), &mut q);
            let ok = s.equations.iter().all(|e| e.holds_at(&q, p).expect("terms checked"));
            ok.then_some(q)
        })
        .collect();
    Ok(AlgebraicSet { vars: s.vars, points })
}

/// `(lhs, rhs) ∈ Rad(Y)`: both sides agree at every point of `Y`.
pub fn radical_member(
    p: &impl NaryOperation,
    y: &AlgebraicSet,
    lhs: &PolyadicTerm,
    rhs: &PolyadicTerm,
) -> Result<bool, TermError> {
    for q in &y.points {
        if eval_term(lhs, q, p)? != eval_term(rhs, q, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Subgroup of a direct power generated by `seeds`, by breadth-first right multiplication.
fn generate_in_power(
    seeds: &[Vec<Elem>],
    identity: Vec<Elem>,
    mul: impl Fn(&[Elem], &[Elem]) -> Vec<Elem>,
    limits: &Limits,
) -> Result<(Vec<Vec<Elem>>, HashMap<Vec<Elem>, usize>), CapExceeded> {
    let mut elements = vec![identity.clone()];
    let mut index = HashMap::from([(identity, 0)]);
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for t in seeds {
            let y = mul(&elements[i], t);
            if !index.contains_key(&y) {
                CapExceeded::check("generated subalgebra", (elements.len() + 1) as u128, limits.max_subalgebra)?;
                index.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    Ok((elements, index))
}

fn tuple_name(names: &dyn Fn(Elem) -> String, t: &[Elem]) -> String {
    let parts: Vec<String> = t.iter().map(|&x| names(x)).collect();
    format!("({})", parts.join(","))
}

/// `Γ(Y)`, realized as term functions on `Y`.
#[derive(Debug, Clone)]
pub struct CoordinateGroup {
    p: PolyadicGroup,
    points: AlgebraicSet,
    elements: Vec<Vec<Elem>>,
    index: HashMap<Vec<Elem>, usize>,
    names: Vec<String>,
    anchor: usize,
    projections: Vec<usize>,
    constants: Vec<usize>,
}

struct PowerOps<'a> {
    p: &'a PolyadicGroup,
}

impl PowerOps<'_> {
    fn apply(&self, args: &[&[Elem]]) -> Vec<Elem> {
        let k = args.first().map_or(0, |a| a.len());
        let mut buf = vec![0; self.p.arity()];
        (0..k)
            .map(|j| {
                for (slot, a) in buf.iter_mut().zip(args) {
                    *slot = a[j];
                }
                self.p.apply(&buf)
            })
            .collect()
    }

    fn skew(&self, x: &[Elem]) -> Vec<Elem> {
        x.iter().map(|&v| self.p.skew_of(v)).collect()
    }

    /// `x ∗ y = f(x, a^{(n−2)}, y)`.
    fn star(&self, a: &[Elem], x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        let n = self.p.arity();
        let mut args: Vec<&[Elem]> = vec![a; n];
        args[0] = x;
        args[n - 1] = y;
        self.apply(&args)
    }

    /// `θ_a(x) = f(ā, x, a^{(n−2)})`.
    fn theta(&self, a: &[Elem], abar: &[Elem], x: &[Elem]) -> Vec<Elem> {
        let n = self.p.arity();
        let mut args: Vec<&[Elem]> = vec![a; n];
        args[0] = abar;
        args[1] = x;
        self.apply(&args)
    }
}

/// Closure of `seeds` under `f` and skew in the power `P^k`, as a subgroup of
/// `ret_a` (with `a` the first seed) generated by the `θ_a`-orbits of the seeds and `b_a`.
fn polyadic_closure(
    p: &PolyadicGroup,
    seeds: &[Vec<Elem>],
    limits: &Limits,
) -> Result<(Vec<Vec<Elem>>, HashMap<Vec<Elem>, usize>), CapExceeded> {
    let ops = PowerOps { p };
    let a = seeds[0].clone();
    let abar = ops.skew(&a);
    let b = ops.apply(&vec![abar.as_slice(); p.arity()]);
    let mut gens: Vec<Vec<Elem>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut queue: VecDeque<Vec<Elem>> = seeds.iter().cloned().chain(std::iter::once(b)).collect();
    while let Some(t) = queue.pop_front() {
        if seen.insert(t.clone()) {
            queue.push_back(ops.theta(&a, &abar, &t));
            gens.push(t);
        }
    }
    generate_in_power(&gens, abar.clone(), |x, y| ops.star(&a, x, y), limits)
}

impl CoordinateGroup {
    /// Generated by the projections and, when `with_constants`, the diagonal constants.
    pub fn new(p: &PolyadicGroup, y: &AlgebraicSet, with_constants: bool, limits: &Limits) -> Result<Self, AlgGeoError> {
        let k = y.len();
        let projections_t: Vec<Vec<Elem>> = (0..y.vars).map(|i| y.points.iter().map(|q| q[i]).collect()).collect();
        let constants_t: Vec<Vec<Elem>> =
            if with_constants { (0..p.order()).map(|g| vec![g; k]).collect() } else { Vec::new() };
        let seeds: Vec<Vec<Elem>> = projections_t.iter().chain(&constants_t).cloned().collect();

        let (elements, index, anchor) = if seeds.is_empty() {
            (Vec::new(), HashMap::new(), 0)
        } else {
            let (elements, index) = polyadic_closure(p, &seeds, limits)?;
            let anchor = index[&seeds[0]];
            (elements, index, anchor)
        };
        let names = elements.iter().map(|t| tuple_name(&|x| p.name(x).to_string(), t)).collect();
        let projections = projections_t.iter().map(|t| index[t]).collect();
        let constants = constants_t.iter().map(|t| index[t]).collect();
        Ok(Self { p: p.clone(), points: y.clone(), elements, index, names, anchor, projections, constants })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn points(&self) -> &AlgebraicSet {
        &self.points
    }

    pub fn elements(&self) -> &[Vec<Elem>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[Elem] {
        &self.elements[i]
    }

    pub fn index_of(&self, tuple: &[Elem]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }

    pub fn projections(&self) -> &[usize] {
        &self.projections
    }

    pub fn constants(&self) -> &[usize] {
        &self.constants
    }

    pub fn base(&self) -> &PolyadicGroup {
        &self.p
    }

    /// The element represented by a term: its values on `Y`.
    pub fn term_image(&self, t: &PolyadicTerm) -> Result<Option<usize>, TermError> {
        let values = self.points.points.iter().map(|q| eval_term(t, q, &self.p)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.index_of(&values))
    }

    /// The same polyadic group as a derived group over its anchor.
    pub fn to_polyadic(&self, limits: &Limits) -> Result<PolyadicGroup, AlgGeoError> {
        let n = self.p.arity();
        let order = self.order();
        if order == 0 {
            return Err(AlgGeoError::Group(GroupError::Empty));
        }
        CapExceeded::check("coordinate group table cells", (order * order) as u128, limits.max_table_cells)?;
        let ops = PowerOps { p: &self.p };
        let a = &self.elements[self.anchor];
        let abar = ops.skew(a);
        let group = FiniteGroup::from_fn(self.names.clone(), |i, j| {
            self.index[&ops.star(a, &self.elements[i], &self.elements[j])]
        })?;
        let theta = Automorphism::new(
            &group,
            self.elements.iter().map(|x| self.index[&ops.theta(a, &abar, x)]).collect(),
        )?;
        let b = self.index[&ops.apply(&vec![abar.as_slice(); n])];
        Ok(PolyadicGroup::derive(group, theta, b, n, limits)?)
    }

    /// Searches `u ∈ H` with `H·u⁻¹` a subgroup of the base power and `H` invariant under
    /// `ψ_u(x) = u·θ̂(x)·θ̂(u⁻¹)`. The skew of the anchor is tried first.
    pub fn structure_witness(&self) -> Result<Option<usize>, AlgGeoError> {
        if self.order() == 0 {
            return Ok(None);
        }
        let d = self.p.derivation()?;
        let g = &d.group;
        let k = self.points.len();
        let abar = PowerOps { p: &self.p }.skew(&self.elements[self.anchor]);
        let first = self.index[&abar];
        let candidates = std::iter::once(first).chain((0..self.order()).filter(|&u| u != first));
        for u in candidates {
            let ut = &self.elements[u];
            let uinv: Vec<Elem> = ut.iter().map(|&x| g.inv(x)).collect();
            let translated: Vec<Vec<Elem>> =
                self.elements.iter().map(|h| (0..k).map(|j| g.mul(h[j], uinv[j])).collect()).collect();
            if !is_subgroup_of_power(g, &translated, k) {
                continue;
            }
            let theta_uinv: Vec<Elem> = uinv.iter().map(|&x| d.theta.apply(x)).collect();
            let invariant = self.elements.iter().all(|h| {
                let image: Vec<Elem> =
                    (0..k).map(|j| g.mul(g.mul(ut[j], d.theta.apply(h[j])), theta_uinv[j])).collect();
                self.index.contains_key(&image)
            });
            if invariant {
                return Ok(Some(u));
            }
        }
        Ok(None)
    }
}

/// True when `set` (containing the identity) is closed under the componentwise product.
fn is_subgroup_of_power(g: &FiniteGroup, set: &[Vec<Elem>], k: usize) -> bool {
    let members: std::collections::HashSet<&[Elem]> = set.iter().map(|v| v.as_slice()).collect();
    let identity = vec![g.identity(); k];
    if !members.contains(identity.as_slice()) {
        return false;
    }
    let mul = |x: &[Elem], y: &[Elem]| -> Vec<Elem> { (0..k).map(|j| g.mul(x[j], y[j])).collect() };
    let mut gens: Vec<Vec<Elem>> = Vec::new();
    let mut reached: std::collections::HashSet<Vec<Elem>> = std::collections::HashSet::from([identity.clone()]);
    for candidate in set {
        if reached.contains(candidate) {
            continue;
        }
        gens.push(candidate.clone());
        let mut queue: VecDeque<Vec<Elem>> = reached.iter().cloned().collect();
        while let Some(x) = queue.pop_front() {
            for t in &gens {
                let y = mul(&x, t);
                if !members.contains(y.as_slice()) {
                    return false;
                }
                if reached.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    reached.len() == set.len()
}

impl NaryOperation for CoordinateGroup {
    fn arity(&self) -> usize {
        self.p.arity()
    }
    fn order(&self) -> usize {
        self.elements.len()
    }
    fn name(&self, x: Elem) -> &str {
        &self.names[x]
    }
    fn apply(&self, args: &[Elem]) -> Elem {
        let tuples: Vec<&[Elem]> = args.iter().map(|&i| self.elements[i].as_slice()).collect();
        self.index[&PowerOps { p: &self.p }.apply(&tuples)]
    }
    fn skew(&self, x: Elem) -> Option<Elem> {
        self.index.get(&PowerOps { p: &self.p }.skew(&self.elements[x])).copied()
    }
}

/// `Γ(Y)`; the coordinate group with coefficients.
pub fn coordinate_group(p: &PolyadicGroup, y: &AlgebraicSet, limits: &Limits) -> Result<CoordinateGroup, AlgGeoError> {
    CoordinateGroup::new(p, y, true, limits)
}

/// Zariski closure in `G^m`, computed against all term functions (with coefficients) on `G^m`.
pub struct Zariski {
    order: usize,
    vars: usize,
    functions: Vec<Vec<Elem>>,
}

impl Zariski {
    pub fn new(p: &PolyadicGroup, vars: usize, limits: &Limits) -> Result<Self, AlgGeoError> {
        let space = full_space(p.order(), vars, limits)?;
        let f = coordinate_group(p, &space, limits)?;
        Ok(Self { order: p.order(), vars, functions: f.elements })
    }

    /// Number of term functions on `G^m`.
    pub fn function_count(&self) -> usize {
        self.functions.len()
    }

    pub fn point_count(&self) -> usize {
        checked_pow(self.order, self.vars) as usize
    }

    fn point_index(&self, q: &[Elem]) -> Result<usize, AlgGeoError> {
        if q.len() != self.vars || q.iter().any(|&x| x >= self.order) {
            return Err(AlgGeoError::BadPoint(q.to_vec()));
        }
        Ok(encode_tuple(q, self.order))
    }

    /// Closure of a set of point indices; the result is sorted.
    pub fn closure_indices(&self, z: &[usize]) -> Vec<usize> {
        let total = self.point_count();
        let mut keep = vec![true; total];
        let mut reps: HashMap<Vec<Elem>, usize> = HashMap::new();
        for (h, values) in self.functions.iter().enumerate() {
            let key: Vec<Elem> = z.iter().map(|&i| values[i]).collect();
            match reps.get(&key) {
                Some(&r) => {
                    let other = &self.functions[r];
                    for (slot, (v, w)) in keep.iter_mut().zip(values.iter().zip(other)) {
                        if v != w {
                            *slot = false;
                        }
                    }
                }
                None => {
                    reps.insert(key, h);
                }
            }
        }
        (0..total).filter(|&i| keep[i]).collect()
    }

    pub fn closure(&self, z: &AlgebraicSet) -> Result<AlgebraicSet, AlgGeoError> {
        let idx = z.points.iter().map(|q| self.point_index(q)).collect::<Result<Vec<_>, _>>()?;
        let points = self
            .closure_indices(&idx)
            .into_iter()
            .map(|i| {
                let mut q = vec![0; self.vars];
                decode_tuple(i, self.order, &mut q);
                q
            })
            .collect();
        Ok(AlgebraicSet { vars: self.vars, points })
    }

    pub fn is_algebraic(&self, z: &AlgebraicSet) -> Result<bool, AlgGeoError> {
        Ok(self.closure(z)?.points == z.points)
    }

    /// True iff `Y` is not the union of two proper algebraic subsets.
    pub fn is_irreducible(&self, y: &AlgebraicSet, limits: &Limits) -> Result<bool, AlgGeoError> {
        Ok(self.decompose(y, limits)?.is_none())
    }

    /// A pair of proper algebraic subsets covering `Y`, if one exists.
    pub fn decompose(&self, y: &AlgebraicSet, limits: &Limits) -> Result<Option<(AlgebraicSet, AlgebraicSet)>, AlgGeoError> {
        let k = y.len();
        CapExceeded::check("irreducibility points", k as u128, limits.max_irreducible_points)?;
        let idx = y.points.iter().map(|q| self.point_index(q)).collect::<Result<Vec<_>, _>>()?;
        let full: u32 = if k == 0 { 0 } else { (1u32 << k) - 1 };
        let closed: Vec<u32> = (0..full)
            .into_par_iter()
            .filter(|&mask| {
                let z: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| idx[i]).collect();
                let mut zs = z.clone();
                zs.sort_unstable();
                self.closure_indices(&z) == zs
            })
            .collect();
        let maximal: Vec<u32> = closed
            .iter()
            .copied()
            .filter(|&m| !closed.iter().any(|&o| o != m && o & m == m))
            .collect();
        let to_set = |mask: u32| {
            let points = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| y.points[i].clone()).collect();
            AlgebraicSet::from_points(y.vars, points)
        };
        for (i, &m1) in maximal.iter().enumerate() {
            for &m2 in &maximal[i..] {
                if m1 | m2 == full {
                    return Ok(Some((to_set(m1), to_set(m2))));
                }
            }
        }
        Ok(None)
    }
}

/// Greedy single pass: drops each equation whose removal keeps `V` unchanged.
pub fn minimal_subsystem(p: &impl NaryOperation, s: &EquationSystem, limits: &Limits) -> Result<EquationSystem, AlgGeoError> {
    let total = checked_pow(p.order(), s.vars);
    CapExceeded::check("points of G^m", total, limits.max_power_order)?;
    if total > 0 && !s.equations.is_empty() {
        check_terms(p, s)?;
    }
    let total = total as usize;
    let words = total.div_ceil(64);
    let bitsets: Vec<Vec<u64>> = s
        .equations
        .par_iter()
        .map(|e| {
            let mut bits = vec![0u64; words];
            let mut q = vec![0; s.vars];
            for i in 0..total {
                decode_tuple(i, p.order(), &mut q);
                if e.holds_at(&q, p).expect("terms checked") {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        })
        .collect();
    let mut all = vec![u64::MAX; words];
    if total % 64 != 0 {
        if let Some(last) = all.last_mut() {
            *last = (1u64 << (total % 64)) - 1;
        }
    }
    let meet = |keep: &[bool], skip: usize| -> Vec<u64> {
        let mut acc = all.clone();
        for (i, b) in bitsets.iter().enumerate() {
            if keep[i] && i != skip {
                acc.iter_mut().zip(b).for_each(|(a, x)| *a &= x);
            }
        }
        acc
    };
    let mut keep = vec![true; s.equations.len()];
    let target = meet(&keep, usize::MAX);
    for i in 0..s.equations.len() {
        if meet(&keep, i) == target {
            keep[i] = false;
        }
    }
    let equations = s.equations.iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| e.clone()).collect();
    Ok(EquationSystem { vars: s.vars, equations })
}

/// Outcome of [`theorem63_check`].
#[derive(Debug, Clone)]
pub struct Theorem63Report {
    /// `|V_G(S)|`.
    pub solutions: usize,
    /// `|Γ_G(S)|`.
    pub coordinate_order: usize,
    /// Order of the Post cover of `Γ_G(S)`.
    pub cover_order: usize,
    /// `|V_{G*}(S)|`.
    pub cover_solutions: usize,
    /// `|Γ_{G*}(S)|`.
    pub cover_coordinate_order: usize,
    /// Images of the cover elements when the epimorphism exists.
    pub epimorphism: Option<Vec<Elem>>,
    pub failure: Option<String>,
}

impl Theorem63Report {
    pub fn holds(&self) -> bool {
        self.epimorphism.is_some()
    }
}

/// Compares the Post cover of `Γ_G(S)` with `Γ_{G*}(S)` by extending
/// `embed(π_i) ↦ π*_i` to a homomorphism and checking it is onto.
pub fn theorem63_check(p: &PolyadicGroup, s: &EquationSystem, limits: &Limits) -> Result<Theorem63Report, AlgGeoError> {
    if let Some(i) = s.equations.iter().position(|e| !e.is_coefficient_free()) {
        return Err(AlgGeoError::NotCoefficientFree(i));
    }
    let v = solve(p, s, limits)?;
    let gamma = CoordinateGroup::new(p, &v, false, limits)?;
    let gamma_p = if gamma.order() == 0 {
        PolyadicGroup::b_derived(FiniteGroup::from_fn(vec!["()".into()], |_, _| 0)?, 0, p.arity(), limits)?
    } else {
        gamma.to_polyadic(limits)?
    };
    let cover_gamma = build_post_cover(&gamma_p, limits)?;

    let star: PostCover = build_post_cover(p, limits)?;
    let cg = star.group();
    let group_eqs: Vec<_> = s.equations.iter().map(|e| polyadic_equation_to_group(e, &star)).collect();
    let total = checked_pow(cg.order(), s.vars);
    CapExceeded::check("points of (G*)^m", total, limits.max_power_order)?;
    let v_star: Vec<Vec<Elem>> = (0..total as usize)
        .into_par_iter()
        .filter_map(|i| {
            let mut q = vec![0; s.vars];
            decode_tuple(i, cg.order(), &mut q);
            group_eqs
                .iter()
                .all(|e| {
                    eval_group_term(&e.left, &q, cg).expect("bound") == eval_group_term(&e.right, &q, cg).expect("bound")
                })
                .then_some(q)
        })
        .collect();
    let k = v_star.len();
    let proj_star: Vec<Vec<Elem>> = (0..s.vars).map(|i| v_star.iter().map(|q| q[i]).collect()).collect();
    let (gstar_elems, gstar_index) = generate_in_power(
        &proj_star,
        vec![cg.identity(); k],
        |x, y| (0..k).map(|j| cg.mul(x[j], y[j])).collect(),
        limits,
    )?;

    let c = cover_gamma.group();
    let gens: Vec<Elem> = gamma.projections().iter().map(|&pi| cover_gamma.embed(pi)).collect();
    let mut image: Vec<Option<usize>> = vec![None; c.order()];
    image[c.identity()] = Some(0);
    let mut queue = VecDeque::from([c.identity()]);
    let mut failure = None;
    'bfs: while let Some(x) = queue.pop_front() {
        let hx = image[x].expect("assigned");
        for (i, &gen) in gens.iter().enumerate() {
            let y = c.mul(x, gen);
            let hy_t: Vec<Elem> = (0..k).map(|j| cg.mul(gstar_elems[hx][j], proj_star[i][j])).collect();
            let hy = gstar_index[&hy_t];
            match image[y] {
                Some(prev) if prev != hy => {
                    failure = Some(format!(
                        "cover element {} would map to both {} and {}",
                        c.name(y),
                        tuple_name(&|e| cg.name(e).to_string(), &gstar_elems[prev]),
                        tuple_name(&|e| cg.name(e).to_string(), &gstar_elems[hy])
                    ));
                    break 'bfs;
                }
                Some(_) => {}
                None => {
                    image[y] = Some(hy);
                    queue.push_back(y);
                }
            }
        }
    }
    if failure.is_none() {
        if let Some(x) = image.iter().position(Option::is_none) {
            failure = Some(format!("cover element {} is not generated by the projections", c.name(x)));
        }
    }
    let mut epimorphism = None;
    if failure.is_none() {
        let images: Vec<usize> = image.iter().map(|v| v.expect("all assigned")).collect();
        let mul_star =
            |x: usize, y: usize| gstar_index[&(0..k).map(|j| cg.mul(gstar_elems[x][j], gstar_elems[y][j])).collect::<Vec<_>>()];
        'hom: for x in c.elements() {
            for y in c.elements() {
                if images[c.mul(x, y)] != mul_star(images[x], images[y]) {
                    failure = Some(format!("not a homomorphism at ({}, {})", c.name(x), c.name(y)));
                    break 'hom;
                }
            }
        }
        if failure.is_none() {
            let mut hit = vec![false; gstar_elems.len()];
            images.iter().for_each(|&i| hit[i] = true);
            if hit.iter().all(|&h| h) {
                epimorphism = Some(images);
            } else {
                failure = Some("homomorphism is not onto".to_string());
            }
        }
    }
    Ok(Theorem63Report {
        solutions: v.len(),
        coordinate_order: gamma_p.order(),
        cover_order: c.order(),
        cover_solutions: k,
        cover_coordinate_order: gstar_elems.len(),
        epimorphism,
        failure,
    })
}
