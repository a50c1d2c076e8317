//! Polyadic (n-ary) groups.
//!
//! A [`PolyadicGroup`] is either derived from an ordinary group, an automorphism
//! `θ` and a fixed point `b` (evaluated lazily as
//! `f(x_1,…,x_n) = x_1·θ(x_2)·…·θ^{n−1}(x_n)·b`), or given by an explicit n-ary
//! table. Raw, possibly invalid, tables are [`NaryTable`]s; the checks in this
//! module work on anything implementing [`NaryOperation`].

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::group::{enumerate_homs, psi_u, Automorphism, FiniteGroup, GroupError};
use crate::{checked_pow, decode_tuple, CapExceeded, Elem, Limits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyadicError {
    #[error("arity {0} is below 3")]
    ArityTooSmall(usize),
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("condition θ(b) = b fails for b = {b} (θ(b) = {image})")]
    ConditionOneFails { b: Elem, image: Elem },
    #[error("condition θ^(n−1)(x) = b·x·b⁻¹ fails at x = {x}")]
    ConditionTwoFails { x: Elem },
    #[error("table has {len} cells, expected {expected}")]
    TableShape { len: usize, expected: usize },
    #[error("table entry {index} = {value} out of range")]
    TableValue { index: usize, value: Elem },
    #[error("n-ary table fails the polyadic group axioms: {0}")]
    AxiomsFail(AxiomReport),
    #[error("no solution to f(x,…,x,y) = x for x = {x}")]
    NoSolution { x: Elem },
    #[error("retract over {anchor} is inconsistent: {detail}")]
    RetractInconsistent { anchor: Elem, detail: String },
    #[error("recovered data fails to reconstruct f at {tuple:?}")]
    ReconstructionMismatch { tuple: Vec<Elem> },
    #[error("recovered data fails: {0}")]
    RecoveryConditionFails(String),
    #[error("element {element} out of range for carrier of size {order}")]
    ElementOutOfRange { element: Elem, order: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// An n-ary operation on the carrier `0..order`.
pub trait NaryOperation: Sync {
    fn arity(&self) -> usize;
    fn order(&self) -> usize;
    fn name(&self, x: Elem) -> &str;
    /// Evaluates `f`; `args.len()` must equal the arity and every index must be in range.
    fn apply(&self, args: &[Elem]) -> Elem;

    /// The unique `y` with `f(x,…,x,y) = x`, found by search.
    fn skew(&self, x: Elem) -> Option<Elem> {
        let mut args = vec![x; self.arity()];
        let last = self.arity() - 1;
        (0..self.order()).find(|&y| {
            args[last] = y;
            self.apply(&args) == x
        })
    }
}

/// A raw n-ary operation table, row-major with the first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaryTable {
    names: Vec<String>,
    arity: usize,
    cells: Vec<Elem>,
}

impl NaryTable {
    pub fn new(names: Vec<String>, arity: usize, cells: Vec<Elem>) -> Result<Self, PolyadicError> {
        if arity < 3 {
            return Err(PolyadicError::ArityTooSmall(arity));
        }
        let expected = checked_pow(names.len(), arity);
        if cells.len() as u128 != expected {
            return Err(PolyadicError::TableShape { len: cells.len(), expected: expected as usize });
        }
        if let Some((index, &value)) = cells.iter().enumerate().find(|(_, &v)| v >= names.len()) {
            return Err(PolyadicError::TableValue { index, value });
        }
        Ok(Self { names, arity, cells })
    }

    pub fn from_operation(op: &impl NaryOperation, limits: &Limits) -> Result<Self, CapExceeded> {
        let count = checked_pow(op.order(), op.arity());
        CapExceeded::check("n-ary table cells", count, limits.max_table_cells)?;
        let mut args = vec![0; op.arity()];
        let cells = (0..count as usize)
            .map(|i| {
                decode_tuple(i, op.order(), &mut args);
                op.apply(&args)
            })
            .collect();
        Ok(Self {
            names: (0..op.order()).map(|x| op.name(x).to_string()).collect(),
            arity: op.arity(),
            cells,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cells(&self) -> &[Elem] {
        &self.cells
    }

    /// Overwrites one cell; used to build corrupted copies for testing verifiers.
    pub fn set_cell(&mut self, index: usize, value: Elem) {
        self.cells[index] = value;
    }
}

impl NaryOperation for NaryTable {
    fn arity(&self) -> usize {
        self.arity
    }
    fn order(&self) -> usize {
        self.names.len()
    }
    fn name(&self, x: Elem) -> &str {
        &self.names[x]
    }
    #[inline]
    fn apply(&self, args: &[Elem]) -> Elem {
        let order = self.names.len();
        self.cells[args.iter().fold(0, |acc, &a| acc * order + a)]
    }
}

/// The data `(G, θ, b)` of a derived polyadic group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub group: FiniteGroup,
    pub theta: Automorphism,
    pub b: Elem,
}

#[derive(Debug, Clone)]
enum Repr {
    Derived { data: Derivation, theta_powers: Vec<Automorphism> },
    Table(NaryTable),
}

/// A validated polyadic group.
#[derive(Debug, Clone)]
pub struct PolyadicGroup {
    arity: usize,
    repr: Repr,
}

impl PolyadicGroup {
    /// `der_{θ,b}(G)` after checking `θ(b) = b` and `θ^{n−1} = (x ↦ b·x·b⁻¹)`.
    pub fn derive(
        group: FiniteGroup,
        theta: Automorphism,
        b: Elem,
        arity: usize,
        limits: &Limits,
    ) -> Result<Self, PolyadicError> {
        if arity < 3 {
            return Err(PolyadicError::ArityTooSmall(arity));
        }
        CapExceeded::check("arity", arity as u128, limits.max_arity)?;
        group.check_element(b)?;
        if theta.images().len() != group.order() {
            return Err(GroupError::WrongImageCount { len: theta.images().len(), expected: group.order() }.into());
        }
        if theta.apply(b) != b {
            return Err(PolyadicError::ConditionOneFails { b, image: theta.apply(b) });
        }
        let top = theta.pow(arity - 1);
        let bi = group.inv(b);
        if let Some(x) = group.elements().find(|&x| top.apply(x) != group.mul(group.mul(b, x), bi)) {
            return Err(PolyadicError::ConditionTwoFails { x });
        }
        let theta_powers = (0..arity).map(|k| theta.pow(k)).collect();
        Ok(Self {
            arity,
            repr: Repr::Derived { data: Derivation { group, theta, b }, theta_powers },
        })
    }

    /// The b-derived group `der_b^n(G)`; `b` must be central.
    pub fn b_derived(group: FiniteGroup, b: Elem, arity: usize, limits: &Limits) -> Result<Self, PolyadicError> {
        let id = Automorphism::identity(&group);
        Self::derive(group, id, b, arity, limits)
    }

    /// Accepts a table only if it passes [`verify_axioms`].
    pub fn from_table(table: NaryTable, limits: &Limits) -> Result<Self, PolyadicError> {
        CapExceeded::check("arity", table.arity as u128, limits.max_arity)?;
        let report = verify_axioms(&table, limits)?;
        if !report.passed() {
            return Err(PolyadicError::AxiomsFail(report));
        }
        Ok(Self { arity: table.arity, repr: Repr::Table(table) })
    }

    pub fn is_derived(&self) -> bool {
        matches!(self.repr, Repr::Derived { .. })
    }

    pub fn as_table(&self) -> Option<&NaryTable> {
        match &self.repr {
            Repr::Table(t) => Some(t),
            Repr::Derived { .. } => None,
        }
    }

    pub fn tabulate(&self, limits: &Limits) -> Result<NaryTable, CapExceeded> {
        match &self.repr {
            Repr::Table(t) => Ok(t.clone()),
            Repr::Derived { .. } => NaryTable::from_operation(self, limits),
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.order()).map(|x| self.name(x).to_string()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        (0..self.order()).find(|&x| self.name(x) == name)
    }

    pub fn eval_f(&self, args: &[Elem]) -> Result<Elem, PolyadicError> {
        if args.len() != self.arity {
            return Err(PolyadicError::ArityMismatch { expected: self.arity, got: args.len() });
        }
        if let Some(&x) = args.iter().find(|&&x| x >= self.order()) {
            return Err(PolyadicError::ElementOutOfRange { element: x, order: self.order() });
        }
        Ok(self.apply(args))
    }

    /// The derivation data: borrowed when derived, recovered over anchor 0 otherwise.
    pub fn derivation(&self) -> Result<Cow<'_, Derivation>, PolyadicError> {
        match &self.repr {
            Repr::Derived { data, .. } => Ok(Cow::Borrowed(data)),
            Repr::Table(_) => {
                let r = hosszu_gloskin(self, 0, &Limits::default())?;
                Ok(Cow::Owned(Derivation { group: r.group, theta: r.theta, b: r.b }))
            }
        }
    }

    /// The skew table `x ↦ x̄`.
    pub fn skew_table(&self) -> Vec<Elem> {
        (0..self.order()).map(|x| self.skew_of(x)).collect()
    }

    /// `x̄`. Derived groups use the closed form `b⁻¹·(θ(x)·θ²(x)·…·θ^{n−2}(x))⁻¹`.
    pub fn skew_of(&self, x: Elem) -> Elem {
        match &self.repr {
            Repr::Derived { data, theta_powers } => {
                let g = &data.group;
                let mut prod = g.identity();
                for k in 1..=self.arity - 2 {
                    prod = g.mul(prod, theta_powers[k].apply(x));
                }
                g.mul(g.inv(data.b), g.inv(prod))
            }
            Repr::Table(t) => t.skew(x).expect("validated table has skew elements"),
        }
    }
}

impl NaryOperation for PolyadicGroup {
    fn arity(&self) -> usize {
        self.arity
    }
    fn order(&self) -> usize {
        match &self.repr {
            Repr::Derived { data, .. } => data.group.order(),
            Repr::Table(t) => t.order(),
        }
    }
    fn name(&self, x: Elem) -> &str {
        match &self.repr {
            Repr::Derived { data, .. } => data.group.name(x),
            Repr::Table(t) => t.name(x),
        }
    }
    #[inline]
    fn apply(&self, args: &[Elem]) -> Elem {
        match &self.repr {
            Repr::Derived { data, theta_powers } => {
                let g = &data.group;
                let mut acc = args[0];
                for (k, &x) in args.iter().enumerate().skip(1) {
                    acc = g.mul(acc, theta_powers[k].apply(x));
                }
                g.mul(acc, data.b)
            }
            Repr::Table(t) => t.apply(args),
        }
    }
    fn skew(&self, x: Elem) -> Option<Elem> {
        Some(self.skew_of(x))
    }
}

/// Associativity failure: the inner application at position 1 and at `position`
/// disagree on `tuple` (positions are 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociativityWitness {
    pub tuple: Vec<Elem>,
    pub positions: (usize, usize),
    pub values: (Elem, Elem),
}

/// A linear equation `f(a_1,…,x,…,a_n) = target` with `x` at `position` (1-based)
/// that has no solution, or (for uniqueness) has at least the two listed ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolvabilityWitness {
    pub position: usize,
    pub fixed: Vec<Elem>,
    pub target: Elem,
    pub solutions: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub arity: usize,
    pub order: usize,
    pub associativity: Option<AssociativityWitness>,
    pub existence: Option<SolvabilityWitness>,
    pub uniqueness: Option<SolvabilityWitness>,
    pub tuples_checked: u128,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.associativity.is_none() && self.existence.is_none() && self.uniqueness.is_none()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "all axioms hold");
        }
        let mut parts = Vec::new();
        if let Some(w) = &self.associativity {
            parts.push(format!(
                "associativity fails at {:?} (positions {} and {})",
                w.tuple, w.positions.0, w.positions.1
            ));
        }
        if let Some(w) = &self.existence {
            parts.push(format!("no solution at position {} for target {} with {:?}", w.position, w.target, w.fixed));
        }
        if let Some(w) = &self.uniqueness {
            parts.push(format!(
                "several solutions {:?} at position {} for target {}",
                w.solutions, w.position, w.target
            ));
        }
        write!(f, "{}", parts.join("; "))
    }
}

fn associativity_witness(op: &(impl NaryOperation + ?Sized), index: usize) -> Option<AssociativityWitness> {
    let n = op.arity();
    let mut tuple = vec![0; 2 * n - 1];
    decode_tuple(index, op.order(), &mut tuple);
    let mut outer = vec![0; n];
    let mut value_at = |i: usize| {
        outer[..i].copy_from_slice(&tuple[..i]);
        outer[i] = op.apply(&tuple[i..i + n]);
        outer[i + 1..].copy_from_slice(&tuple[i + n..]);
        op.apply(&outer)
    };
    let first = value_at(0);
    (1..n).find_map(|i| {
        let v = value_at(i);
        (v != first).then(|| AssociativityWitness {
            tuple: tuple.clone(),
            positions: (1, i + 1),
            values: (first, v),
        })
    })
}

/// Exhaustive check of associativity (all position pairs) and of existence and
/// uniqueness of solutions in every position. Witnesses are lexicographically least.
pub fn verify_axioms<O: NaryOperation>(op: &O, limits: &Limits) -> Result<AxiomReport, CapExceeded> {
    let n = op.arity();
    let order = op.order();
    let assoc_tuples = checked_pow(order, 2 * n - 1);
    CapExceeded::check("associativity tuples", assoc_tuples, limits.max_tuples)?;

    let associativity = (0..assoc_tuples as usize)
        .into_par_iter()
        .find_map_first(|t| associativity_witness(op, t));

    let mut existence = None;
    let mut uniqueness = None;
    let fixed_count = checked_pow(order, n - 1) as usize;
    let mut fixed = vec![0; n - 1];
    let mut args = vec![0; n];
    let mut hits: Vec<Vec<Elem>> = vec![Vec::new(); order];
    'positions: for pos in 0..n {
        for t in 0..fixed_count {
            decode_tuple(t, order, &mut fixed);
            hits.iter_mut().for_each(Vec::clear);
            for x in 0..order {
                args[..pos].copy_from_slice(&fixed[..pos]);
                args[pos] = x;
                args[pos + 1..].copy_from_slice(&fixed[pos..]);
                hits[op.apply(&args)].push(x);
            }
            if existence.is_none() {
                if let Some(target) = (0..order).find(|&b| hits[b].is_empty()) {
                    existence = Some(SolvabilityWitness {
                        position: pos + 1,
                        fixed: fixed.clone(),
                        target,
                        solutions: Vec::new(),
                    });
                }
            }
            if uniqueness.is_none() {
                if let Some(target) = (0..order).find(|&b| hits[b].len() > 1) {
                    uniqueness = Some(SolvabilityWitness {
                        position: pos + 1,
                        fixed: fixed.clone(),
                        target,
                        solutions: hits[target].clone(),
                    });
                }
            }
            if existence.is_some() && uniqueness.is_some() {
                break 'positions;
            }
        }
    }

    Ok(AxiomReport {
        arity: n,
        order,
        associativity,
        existence,
        uniqueness,
        tuples_checked: assoc_tuples,
    })
}

/// Brute-force skew by search, independent of any closed form.
pub fn skew_by_search(op: &(impl NaryOperation + ?Sized), x: Elem) -> Result<Elem, PolyadicError> {
    let mut args = vec![x; op.arity()];
    let last = op.arity() - 1;
    (0..op.order())
        .find(|&y| {
            args[last] = y;
            op.apply(&args) == x
        })
        .ok_or(PolyadicError::NoSolution { x })
}

/// A violated Dörnte identity: `i` is 2..=n, `left` selects which side's form failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DornteWitness {
    pub x: Elem,
    pub y: Elem,
    pub i: usize,
    pub left: bool,
}

/// Checks `f(x^{(i−2)}, x̄, x^{(n−i)}, y) = y = f(y, x^{(n−i)}, x̄, x^{(i−2)})`
/// for all `x, y` and `2 ≤ i ≤ n`. `Ok(None)` means all identities hold.
pub fn dornte_check(op: &impl NaryOperation) -> Result<Option<DornteWitness>, PolyadicError> {
    let n = op.arity();
    let mut args = vec![0; n];
    for x in 0..op.order() {
        let xb = op.skew(x).ok_or(PolyadicError::NoSolution { x })?;
        for y in 0..op.order() {
            for i in 2..=n {
                args.iter_mut().for_each(|a| *a = x);
                args[i - 2] = xb;
                args[n - 1] = y;
                if op.apply(&args) != y {
                    return Ok(Some(DornteWitness { x, y, i, left: true }));
                }
                args.iter_mut().for_each(|a| *a = x);
                args[0] = y;
                args[n - i + 1] = xb;
                if op.apply(&args) != y {
                    return Ok(Some(DornteWitness { x, y, i, left: false }));
                }
            }
        }
    }
    Ok(None)
}

/// The retract `x ∗ y = f(x, a^{(n−2)}, y)`, with its identity and inverse
/// cross-checked against `ā` and `f(ā, x^{(n−3)}, x̄, ā)`.
pub fn retract(op: &impl NaryOperation, a: Elem) -> Result<FiniteGroup, PolyadicError> {
    let n = op.arity();
    let order = op.order();
    if a >= order {
        return Err(PolyadicError::ElementOutOfRange { element: a, order });
    }
    let names = (0..order).map(|x| op.name(x).to_string()).collect();
    let mut args = vec![a; n];
    let group = FiniteGroup::from_fn(names, |x, y| {
        args[0] = x;
        args[n - 1] = y;
        op.apply(&args)
    })?;
    let abar = op.skew(a).ok_or(PolyadicError::NoSolution { x: a })?;
    if group.identity() != abar {
        return Err(PolyadicError::RetractInconsistent {
            anchor: a,
            detail: format!("identity is {} but the skew of the anchor is {}", group.identity(), abar),
        });
    }
    let mut args = vec![0; n];
    for x in 0..order {
        let xb = op.skew(x).ok_or(PolyadicError::NoSolution { x })?;
        args.iter_mut().for_each(|s| *s = x);
        args[0] = abar;
        args[n - 2] = xb;
        args[n - 1] = abar;
        let inv = op.apply(&args);
        if inv != group.inv(x) {
            return Err(PolyadicError::RetractInconsistent {
                anchor: a,
                detail: format!("inverse formula gives {} for {}, table gives {}", inv, x, group.inv(x)),
            });
        }
    }
    Ok(group)
}

/// Some `a` with `f(a^{(i−1)}, x, a^{(n−i)}) = x` for all `x` and `i`.
pub fn nary_identity(op: &impl NaryOperation) -> Option<Elem> {
    let n = op.arity();
    let mut args = vec![0; n];
    (0..op.order()).find(|&a| {
        (0..n).all(|i| {
            (0..op.order()).all(|x| {
                args.iter_mut().for_each(|s| *s = a);
                args[i] = x;
                op.apply(&args) == x
            })
        })
    })
}

/// Output of [`hosszu_gloskin`].
#[derive(Debug, Clone)]
pub struct Recovery {
    pub anchor: Elem,
    pub group: FiniteGroup,
    pub theta: Automorphism,
    pub b: Elem,
}

/// Recovers `(ret_a, θ_a, b_a)` with `θ_a(x) = f(ā, x, a^{(n−2)})` and
/// `b_a = f(ā^{(n)})`, then checks both conditions and reconstructs `f` on every tuple.
pub fn hosszu_gloskin(op: &impl NaryOperation, a: Elem, limits: &Limits) -> Result<Recovery, PolyadicError> {
    let n = op.arity();
    let order = op.order();
    CapExceeded::check("reconstruction tuples", checked_pow(order, n), limits.max_tuples)?;
    let group = retract(op, a)?;
    let abar = group.identity();

    let mut args = vec![a; n];
    args[0] = abar;
    let theta_images: Vec<Elem> = (0..order)
        .map(|x| {
            args[1] = x;
            op.apply(&args)
        })
        .collect();
    let theta = Automorphism::new(&group, theta_images)
        .map_err(|e| PolyadicError::RecoveryConditionFails(format!("θ_a is not an automorphism: {e}")))?;
    let b = op.apply(&vec![abar; n]);

    if theta.apply(b) != b {
        return Err(PolyadicError::RecoveryConditionFails(format!("θ_a(b_a) != b_a for b_a = {b}")));
    }
    let top = theta.pow(n - 1);
    let bi = group.inv(b);
    if let Some(x) = group.elements().find(|&x| top.apply(x) != group.mul(group.mul(b, x), bi)) {
        return Err(PolyadicError::RecoveryConditionFails(format!(
            "θ_a^(n−1) differs from conjugation by b_a at {x}"
        )));
    }

    let powers: Vec<Automorphism> = (0..n).map(|k| theta.pow(k)).collect();
    let total = checked_pow(order, n) as usize;
    let mismatch = (0..total).into_par_iter().find_first(|&t| {
        let mut tuple = vec![0; n];
        decode_tuple(t, order, &mut tuple);
        let mut acc = tuple[0];
        for k in 1..n {
            acc = group.mul(acc, powers[k].apply(tuple[k]));
        }
        group.mul(acc, b) != op.apply(&tuple)
    });
    if let Some(t) = mismatch {
        let mut tuple = vec![0; n];
        decode_tuple(t, order, &mut tuple);
        return Err(PolyadicError::ReconstructionMismatch { tuple });
    }
    Ok(Recovery { anchor: a, group, theta, b })
}

/// All nonempty polyadic subgroups: `H` is one iff for some `u` it is a
/// `ψ_u`-invariant subgroup of `G_u` containing `f(u^{(n)})`.
/// Subgroups of `G_u` are the right translates `K·u` of subgroups `K ≤ G`.
pub fn polyadic_subgroups(p: &PolyadicGroup, limits: &Limits) -> Result<Vec<Vec<Elem>>, PolyadicError> {
    let d = p.derivation()?;
    let g = &d.group;
    let base_subgroups = g.subgroups(limits)?;
    let mut found = BTreeSet::new();
    for u in g.elements() {
        let psi = psi_u(g, &d.theta, u)?;
        let c = p.apply(&vec![u; p.arity()]);
        for k in &base_subgroups {
            let mut h: Vec<Elem> = k.iter().map(|&x| g.mul(x, u)).collect();
            h.sort_unstable();
            let mut member = vec![false; g.order()];
            h.iter().for_each(|&x| member[x] = true);
            if member[c] && h.iter().all(|&x| member[psi.apply(x)]) {
                found.insert(h);
            }
        }
    }
    let mut all: Vec<Vec<Elem>> = found.into_iter().collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(all)
}

/// A polyadic homomorphism `ψ = R_a ∘ φ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyadicHom {
    pub a: Elem,
    pub phi: Vec<Elem>,
    pub images: Vec<Elem>,
}

/// All polyadic homomorphisms `P → Q` from the pairs `(a, φ)` with
/// `h(a^{(n)}) = φ(b) ∗ a` and `φ∘θ = I_a∘η∘φ`. Deduplicated by the induced map.
pub fn polyadic_homs(p: &PolyadicGroup, q: &PolyadicGroup, limits: &Limits) -> Result<Vec<PolyadicHom>, PolyadicError> {
    if p.arity() != q.arity() {
        return Err(PolyadicError::ArityMismatch { expected: p.arity(), got: q.arity() });
    }
    let dp = p.derivation()?;
    let dq = q.derivation()?;
    let (g, h) = (&dp.group, &dq.group);
    let homs = enumerate_homs(g, h, limits)?;
    let mut found: BTreeMap<Vec<Elem>, PolyadicHom> = BTreeMap::new();
    for a in h.elements() {
        let ha = q.apply(&vec![a; q.arity()]);
        let ai = h.inv(a);
        for phi in &homs {
            if ha != h.mul(phi.apply(dp.b), a) {
                continue;
            }
            let intertwines = g.elements().all(|x| {
                phi.apply(dp.theta.apply(x)) == h.mul(h.mul(a, dq.theta.apply(phi.apply(x))), ai)
            });
            if !intertwines {
                continue;
            }
            let images: Vec<Elem> = g.elements().map(|x| h.mul(phi.apply(x), a)).collect();
            found.entry(images.clone()).or_insert(PolyadicHom { a, phi: phi.images().to_vec(), images });
        }
    }
    Ok(found.into_values().collect())
}

/// True when `map` preserves `f`, checked on every n-tuple.
pub fn preserves_operation(p: &impl NaryOperation, q: &impl NaryOperation, map: &[Elem]) -> bool {
    let n = p.arity();
    let total = checked_pow(p.order(), n) as usize;
    let mut tuple = vec![0; n];
    let mut image = vec![0; n];
    (0..total).all(|t| {
        decode_tuple(t, p.order(), &mut tuple);
        for (dst, &x) in image.iter_mut().zip(&tuple) {
            *dst = map[x];
        }
        map[p.apply(&tuple)] == q.apply(&image)
    })
}

/// All nonempty subsets closed under `f` and skew, by exhaustive search.
pub fn closed_subsets_by_search(op: &impl NaryOperation, limits: &Limits) -> Result<Vec<Vec<Elem>>, CapExceeded> {
    let order = op.order();
    CapExceeded::check("subsets", checked_pow(2, order), limits.max_tuples)?;
    let n = op.arity();
    let mut out: Vec<Vec<Elem>> = (1u64..1 << order)
        .into_par_iter()
        .filter_map(|mask| {
            let set: Vec<Elem> = (0..order).filter(|&x| mask >> x & 1 == 1).collect();
            let k = set.len();
            let mut digits = vec![0; n];
            let mut args = vec![0; n];
            let closed = (0..checked_pow(k, n) as usize).all(|t| {
                decode_tuple(t, k, &mut digits);
                for (a, &d) in args.iter_mut().zip(&digits) {
                    *a = set[d];
                }
                mask >> op.apply(&args) & 1 == 1
            }) && set.iter().all(|&x| op.skew(x).is_some_and(|y| mask >> y & 1 == 1));
            closed.then_some(set)
        })
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// All maps `P → Q` preserving `f`, by exhaustive search.
pub fn homs_by_search(p: &impl NaryOperation, q: &impl NaryOperation, limits: &Limits) -> Result<Vec<Vec<Elem>>, CapExceeded> {
    let total = checked_pow(q.order(), p.order());
    CapExceeded::check("maps", total, limits.max_tuples)?;
    let mut out: Vec<Vec<Elem>> = (0..total as usize)
        .into_par_iter()
        .filter_map(|t| {
            let mut map = vec![0; p.order()];
            decode_tuple(t, q.order(), &mut map);
            preserves_operation(p, q, &map).then_some(map)
        })
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn derive_examples() {
        let z3 = catalog::cyclic(3);
        let p = PolyadicGroup::derive(z3.clone(), Automorphism::identity(&z3), 0, 3, &limits()).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    assert_eq!(p.eval_f(&[x, y, z]).unwrap(), (x + y + z) % 3);
                }
            }
        }
        let neg = Automorphism::new(&z3, vec![0, 2, 1]).unwrap();
        let q = PolyadicGroup::derive(z3.clone(), neg.clone(), 0, 3, &limits()).unwrap();
        assert_eq!(q.eval_f(&[1, 2, 0]).unwrap(), (1 + 2 * 2) % 3);
        let err = PolyadicGroup::derive(z3, neg, 1, 3, &limits()).unwrap_err();
        assert_eq!(err, PolyadicError::ConditionOneFails { b: 1, image: 2 });
    }

    #[test]
    fn eval_examples() {
        assert_eq!(catalog::z3_identity().eval_f(&[1, 1, 1]).unwrap(), 0);
        assert_eq!(catalog::z3_negation().eval_f(&[1, 1, 1]).unwrap(), 1);
        let z2 = catalog::cyclic(2);
        let p = PolyadicGroup::b_derived(z2, 1, 3, &limits()).unwrap();
        assert_eq!(p.eval_f(&[0, 0, 0]).unwrap(), 1);
        assert_eq!(
            p.eval_f(&[0, 0]).unwrap_err(),
            PolyadicError::ArityMismatch { expected: 3, got: 2 }
        );
    }

    #[test]
    fn axioms_on_small_examples() {
        let r = verify_axioms(&catalog::z3_negation(), &limits()).unwrap();
        assert!(r.passed());
        assert_eq!(r.tuples_checked, 243);
        let klein = catalog::klein();
        let b = klein.index_of("(1,1)").unwrap();
        let p = PolyadicGroup::b_derived(klein, b, 4, &limits()).unwrap();
        assert!(verify_axioms(&p, &limits()).unwrap().passed());
    }

    #[test]
    fn corrupted_table_reports_associativity() {
        let z2 = catalog::cyclic(2);
        let p = PolyadicGroup::b_derived(z2, 1, 3, &limits()).unwrap();
        let mut t = p.tabulate(&limits()).unwrap();
        let old = t.cells()[5];
        t.set_cell(5, 1 - old);
        let r = verify_axioms(&t, &limits()).unwrap();
        assert!(!r.passed());
        assert!(r.associativity.is_some());
        assert!(r.existence.is_some() && r.uniqueness.is_some());
        assert!(matches!(PolyadicGroup::from_table(t, &limits()), Err(PolyadicError::AxiomsFail(_))));
    }

    #[test]
    fn skew_examples() {
        let p = catalog::z3_identity();
        assert_eq!(p.skew_of(1), 2);
        let q = catalog::z3_negation();
        assert_eq!(q.skew_table(), vec![0, 1, 2]);
        let r = PolyadicGroup::b_derived(catalog::cyclic(2), 1, 3, &limits()).unwrap();
        assert_eq!(r.skew_of(0), 1);
    }

    #[test]
    fn skew_closed_form_matches_search() {
        for (_, p) in catalog::constructible() {
            for x in 0..p.order() {
                assert_eq!(p.skew_of(x), skew_by_search(&p, x).unwrap());
            }
        }
    }

    #[test]
    fn dornte_holds_and_mutation_breaks_it() {
        assert_eq!(dornte_check(&catalog::z3_identity()).unwrap(), None);
        assert_eq!(dornte_check(&catalog::z3_negation()).unwrap(), None);
        let mut t = catalog::z3_identity().tabulate(&limits()).unwrap();
        t.set_cell(0, 1);
        assert!(dornte_check(&t).map(|w| w.is_some()).unwrap_or(true));
    }

    #[test]
    fn retract_examples() {
        let r = retract(&catalog::z3_identity(), 0).unwrap();
        assert_eq!(r, catalog::cyclic(3));
        let r = retract(&catalog::z3_negation(), 0).unwrap();
        assert_eq!(r, catalog::cyclic(3));
    }

    #[test]
    fn identity_search() {
        assert_eq!(nary_identity(&catalog::z3_identity()), Some(0));
        let p = PolyadicGroup::b_derived(catalog::cyclic(2), 1, 3, &limits()).unwrap();
        assert_eq!(nary_identity(&p), None);
        // f(0,x,0) = 2x, so 0 fails in the middle position; no element works.
        assert_eq!(nary_identity(&catalog::z3_negation()), None);
    }

    #[test]
    fn hosszu_gloskin_recovers_z3_negation() {
        let p = catalog::z3_negation();
        let r = hosszu_gloskin(&p, 0, &limits()).unwrap();
        assert_eq!(r.group.identity(), 0);
        assert_eq!(r.theta.images(), &[0, 2, 1]);
        assert_eq!(r.b, 0);
        hosszu_gloskin(&catalog::z3_identity(), 1, &limits()).unwrap();
    }

    #[test]
    fn table_round_trip_through_recovery() {
        for (_, p) in catalog::constructible() {
            let table = p.tabulate(&limits()).unwrap();
            let tp = PolyadicGroup::from_table(table.clone(), &limits()).unwrap();
            let r = hosszu_gloskin(&tp, 0, &limits()).unwrap();
            let rebuilt = PolyadicGroup::derive(r.group, r.theta, r.b, p.arity(), &limits()).unwrap();
            assert_eq!(rebuilt.tabulate(&limits()).unwrap().cells(), table.cells());
        }
    }

    #[test]
    fn subgroups_of_z3_identity() {
        let subs = polyadic_subgroups(&catalog::z3_identity(), &limits()).unwrap();
        assert_eq!(subs, vec![vec![0], vec![0, 1, 2]]);
    }

    #[test]
    fn subgroups_match_closed_subsets() {
        let klein = catalog::klein();
        let plain = PolyadicGroup::b_derived(klein, 0, 3, &limits()).unwrap();
        let subs = polyadic_subgroups(&plain, &limits()).unwrap();
        assert!(catalog::klein().subgroups(&limits()).unwrap().iter().all(|k| subs.contains(k)));
        let mut all = catalog::constructible();
        all.push(("plain klein", plain));
        for (label, p) in all {
            assert_eq!(
                polyadic_subgroups(&p, &limits()).unwrap(),
                closed_subsets_by_search(&p, &limits()).unwrap(),
                "{label}"
            );
        }
    }

    #[test]
    fn homs_match_brute_force() {
        let pairs = [
            (catalog::z3_identity(), catalog::z3_identity()),
            (catalog::z3_negation(), catalog::z3_negation()),
            (catalog::z3_negation(), catalog::z3_identity()),
            (catalog::z4_negation(0), catalog::z4_negation(2)),
            (catalog::z4_negation(2), catalog::z3_negation()),
        ];
        for (p, q) in pairs {
            let via_pairs: Vec<Vec<Elem>> =
                polyadic_homs(&p, &q, &limits()).unwrap().into_iter().map(|h| h.images).collect();
            assert_eq!(via_pairs, homs_by_search(&p, &q, &limits()).unwrap());
        }
    }

    #[test]
    fn homs_of_z3_identity() {
        let p = catalog::z3_identity();
        let homs = polyadic_homs(&p, &p, &limits()).unwrap();
        let maps: Vec<Vec<Elem>> = homs.iter().map(|h| h.images.clone()).collect();
        assert_eq!(maps, vec![vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 1]]);
        for h in &homs {
            assert!(preserves_operation(&p, &p, &h.images));
        }
    }
}
