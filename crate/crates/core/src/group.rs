//! Finite ordinary groups given by multiplication tables.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::{checked_pow, decode_tuple, encode_tuple, CapExceeded, Elem, Limits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("empty carrier")]
    Empty,
    #[error("names list has {names} entries but the table has {rows} rows")]
    NameCountMismatch { names: usize, rows: usize },
    #[error("table is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) = {value} is out of range")]
    IndexOutOfRange { row: usize, col: usize, value: usize },
    #[error("not a Latin square: value {value} repeats in {line} {index} (columns/rows {first} and {second})")]
    NotLatinSquare {
        line: &'static str,
        index: usize,
        value: usize,
        first: usize,
        second: usize,
    },
    #[error("not associative: ({x}·{y})·{z} != {x}·({y}·{z})")]
    NotAssociative { x: Elem, y: Elem, z: Elem },
    #[error("no identity element")]
    NoIdentity,
    #[error("element {x} has no inverse")]
    NoInverse { x: Elem },
    #[error("element {element} out of range for a group of order {order}")]
    ElementOutOfRange { element: Elem, order: usize },
    #[error("map has {len} images, expected {expected}")]
    WrongImageCount { len: usize, expected: usize },
    #[error("map is not injective: {x} and {y} share an image")]
    NotBijective { x: Elem, y: Elem },
    #[error("map does not preserve the product at ({x}, {y})")]
    NotHomomorphism { x: Elem, y: Elem },
    #[error(transparent)]
    Cap(#[from] CapExceeded),
}

/// A validated finite group on the carrier `0..order`.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    order: usize,
    table: Vec<Elem>,
    identity: Elem,
    inverses: Vec<Elem>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("names", &self.names)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates a table given as rows of element indices.
    ///
    /// Checks run in the order: shape, Latin square, associativity, identity,
    /// inverses. Each error names the first violating tuple in lexicographic order.
    pub fn validate(names: Vec<String>, rows: Vec<Vec<Elem>>) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if names.len() != order {
            return Err(GroupError::NameCountMismatch { names: names.len(), rows: order });
        }
        let mut table = Vec::with_capacity(order * order);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::NotSquare { row: r, len: row.len(), expected: order });
            }
            for (c, &v) in row.iter().enumerate() {
                if v >= order {
                    return Err(GroupError::IndexOutOfRange { row: r, col: c, value: v });
                }
            }
            table.extend_from_slice(row);
        }
        Self::validate_flat(names, table)
    }

    /// Builds and validates a group from a product function on `0..order`.
    pub fn from_fn(names: Vec<String>, mut mul: impl FnMut(Elem, Elem) -> Elem) -> Result<Self, GroupError> {
        let order = names.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        let mut table = Vec::with_capacity(order * order);
        for x in 0..order {
            for y in 0..order {
                let v = mul(x, y);
                if v >= order {
                    return Err(GroupError::IndexOutOfRange { row: x, col: y, value: v });
                }
                table.push(v);
            }
        }
        Self::validate_flat(names, table)
    }

    fn validate_flat(names: Vec<String>, table: Vec<Elem>) -> Result<Self, GroupError> {
        let order = names.len();
        let at = |x: usize, y: usize| table[x * order + y];

        let mut seen = vec![usize::MAX; order];
        for r in 0..order {
            seen.iter_mut().for_each(|s| *s = usize::MAX);
            for c in 0..order {
                let v = at(r, c);
                if seen[v] != usize::MAX {
                    return Err(GroupError::NotLatinSquare {
                        line: "row",
                        index: r,
                        value: v,
                        first: seen[v],
                        second: c,
                    });
                }
                seen[v] = c;
            }
        }
        for c in 0..order {
            seen.iter_mut().for_each(|s| *s = usize::MAX);
            for r in 0..order {
                let v = at(r, c);
                if seen[v] != usize::MAX {
                    return Err(GroupError::NotLatinSquare {
                        line: "column",
                        index: c,
                        value: v,
                        first: seen[v],
                        second: r,
                    });
                }
                seen[v] = r;
            }
        }
        for x in 0..order {
            for y in 0..order {
                let xy = at(x, y);
                for z in 0..order {
                    if at(xy, z) != at(x, at(y, z)) {
                        return Err(GroupError::NotAssociative { x, y, z });
                    }
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverses = Vec::with_capacity(order);
        for x in 0..order {
            let inv = (0..order)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or(GroupError::NoInverse { x })?;
            inverses.push(inv);
        }
        Ok(Self { names, order, table, identity, inverses })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.table[x * self.order + y]
    }

    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        self.inverses[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: Elem) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    /// Rows of the multiplication table.
    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> {
        self.table.chunks(self.order)
    }

    pub fn check_element(&self, x: Elem) -> Result<(), GroupError> {
        if x < self.order {
            Ok(())
        } else {
            Err(GroupError::ElementOutOfRange { element: x, order: self.order })
        }
    }

    /// `x^k` for any integer `k`.
    pub fn pow(&self, x: Elem, k: i64) -> Elem {
        let base = if k < 0 { self.inv(x) } else { x };
        let mut acc = self.identity;
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    pub fn element_order(&self, x: Elem) -> usize {
        let mut k = 1;
        let mut acc = x;
        while acc != self.identity {
            acc = self.mul(acc, x);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|x| self.elements().all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generate(&self, gens: &[Elem]) -> Vec<Elem> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(c) = queue.pop_front() {
            for &g in gens {
                let d = self.mul(c, g);
                if !member[d] {
                    member[d] = true;
                    queue.push_back(d);
                }
            }
        }
        (0..self.order).filter(|&x| member[x]).collect()
    }

    /// A generating set chosen greedily, preferring elements of large order.
    pub fn generating_set(&self) -> Vec<Elem> {
        let mut candidates: Vec<Elem> = self.elements().collect();
        candidates.sort_by_key(|&x| (std::cmp::Reverse(self.element_order(x)), x));
        let mut gens = Vec::new();
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        for x in candidates {
            if !member[x] {
                gens.push(x);
                for y in self.generate(&gens) {
                    member[y] = true;
                }
            }
        }
        gens
    }

    /// All subgroups, each as a sorted element list, in canonical order.
    pub fn subgroups(&self, limits: &Limits) -> Result<Vec<Vec<Elem>>, CapExceeded> {
        CapExceeded::check("subgroup enumeration order", self.order as u128, limits.max_group_order)?;
        let cyclic: BTreeSet<Vec<Elem>> = self.elements().map(|g| self.generate(&[g])).collect();
        let cyclic: Vec<(Elem, Vec<Elem>)> = cyclic
            .into_iter()
            .map(|c| {
                let g = *c.iter().max_by_key(|&&x| self.element_order(x)).unwrap();
                (g, c)
            })
            .collect();
        let mut found: BTreeSet<Vec<Elem>> = cyclic.iter().map(|(_, c)| c.clone()).collect();
        let mut frontier: Vec<Vec<Elem>> = found.iter().cloned().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for sub in &frontier {
                let mut in_sub = vec![false; self.order];
                sub.iter().for_each(|&x| in_sub[x] = true);
                for (g, _) in &cyclic {
                    if in_sub[*g] {
                        continue;
                    }
                    let mut gens = sub.clone();
                    gens.push(*g);
                    let joined = self.generate(&gens);
                    if found.insert(joined.clone()) {
                        next.push(joined);
                    }
                }
            }
            frontier = next;
        }
        let mut all: Vec<Vec<Elem>> = found.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(all)
    }

    /// Restriction of the table to a subset closed under the product.
    pub fn subgroup(&self, elements: &[Elem]) -> Result<FiniteGroup, GroupError> {
        let mut position = vec![usize::MAX; self.order];
        for (i, &x) in elements.iter().enumerate() {
            self.check_element(x)?;
            position[x] = i;
        }
        let names = elements.iter().map(|&x| self.names[x].clone()).collect();
        let rows = elements
            .iter()
            .enumerate()
            .map(|(r, &x)| {
                elements
                    .iter()
                    .enumerate()
                    .map(|(c, &y)| {
                        let p = position[self.mul(x, y)];
                        if p == usize::MAX {
                            Err(GroupError::IndexOutOfRange { row: r, col: c, value: self.mul(x, y) })
                        } else {
                            Ok(p)
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::validate(names, rows)
    }
}

/// Checks that `images` is a bijective endomorphism of `group`.
fn check_automorphism(group: &FiniteGroup, images: &[Elem]) -> Result<(), GroupError> {
    if images.len() != group.order() {
        return Err(GroupError::WrongImageCount { len: images.len(), expected: group.order() });
    }
    let mut preimage = vec![usize::MAX; group.order()];
    for (x, &y) in images.iter().enumerate() {
        group.check_element(y)?;
        if preimage[y] != usize::MAX {
            return Err(GroupError::NotBijective { x: preimage[y], y: x });
        }
        preimage[y] = x;
    }
    check_hom(group, group, images)
}

fn check_hom(source: &FiniteGroup, target: &FiniteGroup, images: &[Elem]) -> Result<(), GroupError> {
    if images.len() != source.order() {
        return Err(GroupError::WrongImageCount { len: images.len(), expected: source.order() });
    }
    for &y in images {
        target.check_element(y)?;
    }
    for x in source.elements() {
        for y in source.elements() {
            if images[source.mul(x, y)] != target.mul(images[x], images[y]) {
                return Err(GroupError::NotHomomorphism { x, y });
            }
        }
    }
    Ok(())
}

/// An automorphism stored as its full image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Automorphism {
    images: Vec<Elem>,
}

impl Automorphism {
    pub fn new(group: &FiniteGroup, images: Vec<Elem>) -> Result<Self, GroupError> {
        check_automorphism(group, &images)?;
        Ok(Self { images })
    }

    pub fn identity(group: &FiniteGroup) -> Self {
        Self { images: group.elements().collect() }
    }

    /// Conjugation `x ↦ g·x·g⁻¹`.
    pub fn inner(group: &FiniteGroup, g: Elem) -> Self {
        let gi = group.inv(g);
        Self {
            images: group.elements().map(|x| group.mul(group.mul(g, x), gi)).collect(),
        }
    }

    pub(crate) fn from_images_unchecked(images: Vec<Elem>) -> Self {
        Self { images }
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.images[x]
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn pow(&self, k: usize) -> Automorphism {
        let mut acc = Automorphism { images: (0..self.images.len()).collect() };
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }
}

/// A homomorphism between two finite groups, stored as an image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hom {
    images: Vec<Elem>,
}

impl Hom {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, images: Vec<Elem>) -> Result<Self, GroupError> {
        check_hom(source, target, &images)?;
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<Elem>) -> Self {
        Self { images }
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.images[x]
    }

    pub fn images(&self) -> &[Elem] {
        &self.images
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        self.images.iter().all(|&y| y < seen.len() && !std::mem::replace(&mut seen[y], true))
    }
}

/// The group `G_u` with product `x ∗ y = x·u⁻¹·y` on the carrier of `G`.
#[derive(Debug, Clone)]
pub struct TwistedGroup {
    pub u: Elem,
    pub group: FiniteGroup,
}

impl TwistedGroup {
    /// The isomorphism `x ↦ x·u` from the base group onto `G_u`.
    pub fn isomorphism_from_base(&self, base: &FiniteGroup) -> Hom {
        Hom::from_images_unchecked(base.elements().map(|x| base.mul(x, self.u)).collect())
    }
}

pub fn twisted_group(base: &FiniteGroup, u: Elem) -> Result<TwistedGroup, GroupError> {
    base.check_element(u)?;
    let ui = base.inv(u);
    let group = FiniteGroup::from_fn(base.names().to_vec(), |x, y| base.mul(base.mul(x, ui), y))?;
    Ok(TwistedGroup { u, group })
}

/// `ψ_u(x) = u·θ(x)·θ(u⁻¹)`, an automorphism of `G_u`.
pub fn psi_u(base: &FiniteGroup, theta: &Automorphism, u: Elem) -> Result<Automorphism, GroupError> {
    let twisted = twisted_group(base, u)?;
    let tail = theta.apply(base.inv(u));
    let images = base
        .elements()
        .map(|x| base.mul(base.mul(u, theta.apply(x)), tail))
        .collect();
    Automorphism::new(&twisted.group, images)
}

/// The direct power `G^k` with elements encoded in mixed radix, first coordinate
/// most significant.
#[derive(Debug, Clone, Copy)]
pub struct DirectPower<'a> {
    base: &'a FiniteGroup,
    width: usize,
}

impl<'a> DirectPower<'a> {
    pub fn new(base: &'a FiniteGroup, width: usize, limits: &Limits) -> Result<Self, CapExceeded> {
        CapExceeded::check("direct power order", checked_pow(base.order(), width), limits.max_power_order)?;
        Ok(Self { base, width })
    }

    pub fn order(&self) -> usize {
        checked_pow(self.base.order(), self.width) as usize
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn encode(&self, tuple: &[Elem]) -> Elem {
        encode_tuple(tuple, self.base.order())
    }

    pub fn decode(&self, x: Elem) -> Vec<Elem> {
        let mut out = vec![0; self.width];
        decode_tuple(x, self.base.order(), &mut out);
        out
    }

    pub fn mul(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.base.mul(a, b)).collect()
    }

    /// The tuple `(b, b, …, b)`.
    pub fn constant_tuple(&self, b: Elem) -> Elem {
        self.encode(&vec![b; self.width])
    }

    /// `θ̂` acting coordinatewise.
    pub fn induced_automorphism(&self, theta: &Automorphism) -> Automorphism {
        let images = (0..self.order())
            .map(|x| {
                let t: Vec<Elem> = self.decode(x).into_iter().map(|c| theta.apply(c)).collect();
                self.encode(&t)
            })
            .collect();
        Automorphism::from_images_unchecked(images)
    }

    /// Materializes the power as a validated group table.
    pub fn materialize(&self, limits: &Limits) -> Result<FiniteGroup, GroupError> {
        let order = self.order();
        CapExceeded::check("direct power table cells", (order as u128).pow(2), limits.max_table_cells)?;
        let names = (0..order)
            .map(|x| {
                let parts: Vec<&str> = self.decode(x).into_iter().map(|c| self.base.name(c)).collect();
                if self.width == 1 {
                    parts[0].to_string()
                } else {
                    format!("({})", parts.join(","))
                }
            })
            .collect();
        FiniteGroup::from_fn(names, |x, y| self.encode(&self.mul(&self.decode(x), &self.decode(y))))
    }
}

/// Extends generator images to a map on the subgroup they generate, returning
/// `None` when the assignment is inconsistent.
fn extend_from_generators(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[Elem],
    images: &[Elem],
) -> Option<Vec<Option<Elem>>> {
    let mut map = vec![None; source.order()];
    map[source.identity()] = Some(target.identity());
    let mut queue = VecDeque::from([source.identity()]);
    while let Some(c) = queue.pop_front() {
        let hc = map[c].unwrap();
        for (&g, &hg) in gens.iter().zip(images) {
            let d = source.mul(c, g);
            let hd = target.mul(hc, hg);
            match map[d] {
                Some(existing) if existing != hd => return None,
                Some(_) => {}
                None => {
                    map[d] = Some(hd);
                    queue.push_back(d);
                }
            }
        }
    }
    Some(map)
}

struct HomSearch<'a> {
    source: &'a FiniteGroup,
    target: &'a FiniteGroup,
    gens: Vec<Elem>,
    candidates: Vec<Vec<Elem>>,
    injective: bool,
}

impl HomSearch<'_> {
    fn run(&self, chosen: &mut Vec<Elem>, visit: &mut dyn FnMut(Vec<Elem>) -> bool) -> bool {
        let k = chosen.len();
        if k == self.gens.len() {
            let map = extend_from_generators(self.source, self.target, &self.gens, chosen)
                .expect("prefix was consistent");
            let images: Vec<Elem> = map.into_iter().map(|m| m.unwrap()).collect();
            return visit(images);
        }
        for &img in &self.candidates[k] {
            chosen.push(img);
            let ok = match extend_from_generators(self.source, self.target, &self.gens[..=k], chosen) {
                None => false,
                Some(map) if self.injective => {
                    let mut seen = vec![false; self.target.order()];
                    map.iter().flatten().all(|&y| !std::mem::replace(&mut seen[y], true))
                }
                Some(_) => true,
            };
            if ok && self.run(chosen, visit) {
                chosen.pop();
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// All homomorphisms `source → target`, sorted by image array.
pub fn enumerate_homs(source: &FiniteGroup, target: &FiniteGroup, limits: &Limits) -> Result<Vec<Hom>, CapExceeded> {
    CapExceeded::check("hom source order", source.order() as u128, limits.max_group_order)?;
    CapExceeded::check("hom target order", target.order() as u128, limits.max_group_order)?;
    let gens = source.generating_set();
    let candidates = gens
        .iter()
        .map(|&g| {
            let og = source.element_order(g);
            target.elements().filter(|&h| og % target.element_order(h) == 0).collect()
        })
        .collect();
    let search = HomSearch { source, target, gens, candidates, injective: false };
    let mut found = BTreeSet::new();
    search.run(&mut Vec::new(), &mut |images| {
        found.insert(images);
        false
    });
    Ok(found.into_iter().map(Hom::from_images_unchecked).collect())
}

/// Returns an isomorphism `a → b` when one exists.
pub fn are_isomorphic(a: &FiniteGroup, b: &FiniteGroup, limits: &Limits) -> Result<Option<Hom>, CapExceeded> {
    CapExceeded::check("isomorphism test order", a.order().max(b.order()) as u128, limits.max_group_order)?;
    if a.order() != b.order() {
        return Ok(None);
    }
    let order_profile = |g: &FiniteGroup| {
        let mut v: Vec<usize> = g.elements().map(|x| g.element_order(x)).collect();
        v.sort_unstable();
        v
    };
    if order_profile(a) != order_profile(b) {
        return Ok(None);
    }
    let gens = a.generating_set();
    let candidates = gens
        .iter()
        .map(|&g| {
            let og = a.element_order(g);
            b.elements().filter(|&h| b.element_order(h) == og).collect()
        })
        .collect();
    let search = HomSearch { source: a, target: b, gens, candidates, injective: true };
    let mut witness = None;
    search.run(&mut Vec::new(), &mut |images| {
        let hom = Hom::from_images_unchecked(images);
        if hom.is_bijective() {
            witness = Some(hom);
            true
        } else {
            false
        }
    });
    Ok(witness)
}
