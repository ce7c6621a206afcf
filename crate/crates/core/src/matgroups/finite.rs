//! Small abstract groups given by multiplication tables, with homomorphisms
//! and fiber products.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::matgroups::group::SubgroupGens;

/// A finite group on `0..order` with identity 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    pub name: String,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    pub generators: Vec<usize>,
}

impl FiniteGroup {
    /// Build from any hashable element type, a multiplication and generators.
    pub fn from_generators<T, F>(name: &str, identity: T, gens: &[T], mul: F, cap: usize) -> Result<Self>
    where
        T: Clone + Eq + std::hash::Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let y = mul(&elems[i], g);
                if !index.contains_key(&y) {
                    if elems.len() >= cap {
                        return Err(Error::Overflow { cap });
                    }
                    index.insert(y.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(y);
                }
            }
        }
        let n = elems.len();
        let table: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).map(|j| index[&mul(&elems[i], &elems[j])]).collect())
            .collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        Ok(Self::from_table(name, table, generators))
    }

    fn from_table(name: &str, table: Vec<Vec<usize>>, generators: Vec<usize>) -> Self {
        let n = table.len();
        let inverse = (0..n)
            .map(|i| (0..n).find(|&j| table[i][j] == 0).expect("group table has inverses"))
            .collect();
        FiniteGroup { name: name.to_string(), table, inverse, generators }
    }

    pub fn from_matrix_group(name: &str, g: &SubgroupGens) -> Result<Self> {
        let spec = g.spec.clone();
        let id = crate::matgroups::mat::Mat2::identity(&spec);
        Self::from_generators(name, id, &g.generators, |a, b| a.mul(&spec, b), crate::matgroups::group::DEFAULT_CAP)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn is_central(&self, z: usize) -> bool {
        (0..self.order()).all(|x| self.mul(z, x) == self.mul(x, z))
    }

    pub fn center(&self) -> Vec<usize> {
        (0..self.order()).filter(|&z| self.is_central(z)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.center().len() == self.order()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Conjugacy classes, each sorted, in order of least element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut class: Vec<usize> = (0..n).map(|g| self.mul(self.mul(g, x), self.inv(g))).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            out.push(class);
        }
        out
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(&format!("Z/{n}"), table, if n > 1 { vec![1] } else { vec![] })
    }

    /// Symmetric group on `n` points from the transposition and the n-cycle.
    pub fn symmetric(n: usize) -> Self {
        let id: Vec<usize> = (0..n).collect();
        let mut t = id.clone();
        if n > 1 {
            t.swap(0, 1);
        }
        let c: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_generators(&format!("S{n}"), id, &[t, c], |a, b| compose(a, b), 100_000).expect("small")
    }

    /// Dihedral group of order 2n.
    pub fn dihedral(n: usize) -> Self {
        let id: Vec<usize> = (0..n).collect();
        let r: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let s: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_generators(&format!("D{n}"), id, &[r, s], |a, b| compose(a, b), 100_000).expect("small")
    }

    /// Quaternion group of order 8 as 2x2 complex matrices with entries in {0, +-1, +-i}.
    pub fn quaternion() -> Self {
        type Q = [(i8, i8); 4];
        let mul = |a: &Q, b: &Q| -> Q {
            let cm = |x: (i8, i8), y: (i8, i8)| (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0);
            let add = |x: (i8, i8), y: (i8, i8)| (x.0 + y.0, x.1 + y.1);
            [
                add(cm(a[0], b[0]), cm(a[1], b[2])),
                add(cm(a[0], b[1]), cm(a[1], b[3])),
                add(cm(a[2], b[0]), cm(a[3], b[2])),
                add(cm(a[2], b[1]), cm(a[3], b[3])),
            ]
        };
        let id: Q = [(1, 0), (0, 0), (0, 0), (1, 0)];
        let i: Q = [(0, 1), (0, 0), (0, 0), (0, -1)];
        let j: Q = [(0, 0), (1, 0), (-1, 0), (0, 0)];
        Self::from_generators("Q8", id, &[i, j], mul, 100).expect("small")
    }

    /// Direct product.
    pub fn product(&self, other: &FiniteGroup) -> FiniteGroup {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect())
            .collect();
        let mut gens: Vec<usize> = self.generators.iter().map(|&g| g * m).collect();
        gens.extend(other.generators.iter().copied());
        Self::from_table(&format!("{}x{}", self.name, other.name), table, gens)
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a * b)(i) = a(b(i))
    b.iter().map(|&i| a[i]).collect()
}

/// A homomorphism given by the image of every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    pub images: Vec<usize>,
}

impl GroupHom {
    /// Extend generator images to the whole group, verifying well-definedness.
    pub fn from_generator_images(src: &FiniteGroup, dst: &FiniteGroup, gen_images: &[usize]) -> Result<Self> {
        if gen_images.len() != src.generators.len() {
            return Err(Error::invalid("one image per generator is required"));
        }
        let mut images = vec![usize::MAX; src.order()];
        images[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (g, &gi) in src.generators.iter().zip(gen_images) {
                let y = src.mul(x, *g);
                let im = dst.mul(images[x], gi);
                if images[y] == usize::MAX {
                    images[y] = im;
                    queue.push_back(y);
                }
            }
        }
        let hom = GroupHom { images };
        hom.verify(src, dst)?;
        Ok(hom)
    }

    pub fn verify(&self, src: &FiniteGroup, dst: &FiniteGroup) -> Result<()> {
        if self.images.len() != src.order() || self.images.iter().any(|&i| i >= dst.order()) {
            return Err(Error::invalid("map is not defined on every element"));
        }
        for a in 0..src.order() {
            for b in 0..src.order() {
                if self.images[src.mul(a, b)] != dst.mul(self.images[a], self.images[b]) {
                    return Err(Error::invalid(format!(
                        "map {} -> {} is not a homomorphism",
                        src.name, dst.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_surjective(&self, dst: &FiniteGroup) -> bool {
        let mut hit = vec![false; dst.order()];
        for &i in &self.images {
            hit[i] = true;
        }
        hit.into_iter().all(|b| b)
    }
}

/// Fiber product of groups over surjections onto a common group.
#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub group: FiniteGroup,
    /// Component indices of each element.
    pub tuples: Vec<Vec<usize>>,
}

pub fn fiber_product(groups: &[FiniteGroup], homs: &[GroupHom], target: &FiniteGroup) -> Result<FiberProduct> {
    if groups.is_empty() || groups.len() != homs.len() {
        return Err(Error::invalid("need one surjection per group"));
    }
    for (g, h) in groups.iter().zip(homs) {
        h.verify(g, target)?;
        if !h.is_surjective(target) {
            return Err(Error::invalid(format!("the map from {} is not surjective", g.name)));
        }
    }
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for (g, h) in groups.iter().zip(homs) {
        let mut next = Vec::new();
        for t in &tuples {
            for x in 0..g.order() {
                if t.is_empty() || h.images[x] == homs[0].images[t[0]] {
                    let mut u = t.clone();
                    u.push(x);
                    next.push(u);
                }
            }
        }
        tuples = next;
    }
    let index: HashMap<Vec<usize>, usize> = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let table: Vec<Vec<usize>> = tuples
        .iter()
        .map(|a| {
            tuples
                .iter()
                .map(|b| {
                    let c: Vec<usize> = a.iter().zip(b).zip(groups).map(|((x, y), g)| g.mul(*x, *y)).collect();
                    index[&c]
                })
                .collect()
        })
        .collect();
    let names: Vec<&str> = groups.iter().map(|g| g.name.as_str()).collect();
    let name = format!("{} over {}", names.join(" x "), target.name);
    // All elements as generators keeps the structure honest without a search.
    let generators = (1..tuples.len()).collect();
    Ok(FiberProduct { group: FiniteGroup::from_table(&name, table, generators), tuples })
}

impl FiberProduct {
    /// Elements whose every component is central in its own group.
    pub fn componentwise_central(&self, groups: &[FiniteGroup]) -> Vec<usize> {
        self.tuples
            .iter()
            .enumerate()
            .filter(|(_, t)| t.iter().zip(groups).all(|(&x, g)| g.is_central(x)))
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sign(s3: &FiniteGroup, z2: &FiniteGroup) -> GroupHom {
        // transposition -> 1, 3-cycle -> 0
        GroupHom::from_generator_images(s3, z2, &[1, 0]).unwrap()
    }

    #[test]
    fn library_orders() {
        assert_eq!(FiniteGroup::symmetric(3).order(), 6);
        assert_eq!(FiniteGroup::symmetric(4).order(), 24);
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        assert_eq!(FiniteGroup::quaternion().order(), 8);
        assert_eq!(FiniteGroup::quaternion().center().len(), 2);
        assert_eq!(FiniteGroup::dihedral(4).center().len(), 2);
        assert_eq!(FiniteGroup::symmetric(4).conjugacy_classes().len(), 5);
    }

    #[test]
    fn s3_fiber_product() {
        let s3 = FiniteGroup::symmetric(3);
        let z2 = FiniteGroup::cyclic(2);
        let h = sign(&s3, &z2);
        let fp = fiber_product(&[s3.clone(), s3.clone()], &[h.clone(), h], &z2).unwrap();
        assert_eq!(fp.group.order(), 18);
        assert_eq!(fp.group.center(), vec![0]);
        assert_eq!(fp.componentwise_central(&[s3.clone(), s3]), vec![0]);
    }

    #[test]
    fn trivial_base_gives_direct_product() {
        let q8 = FiniteGroup::quaternion();
        let one = FiniteGroup::cyclic(1);
        let h = GroupHom { images: vec![0; 8] };
        let fp = fiber_product(&[q8.clone(), q8.clone()], &[h.clone(), h], &one).unwrap();
        assert_eq!(fp.group.order(), 64);
        assert_eq!(fp.group.center().len(), 4);
    }

    #[test]
    fn cyclic_fiber_product_is_abelian() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        let h = GroupHom::from_generator_images(&z4, &z2, &[1]).unwrap();
        let fp = fiber_product(&[z4.clone(), z4], &[h.clone(), h], &z2).unwrap();
        assert_eq!(fp.group.order(), 8);
        assert!(fp.group.is_abelian());
    }

    #[test]
    fn rejects_bad_maps() {
        let s3 = FiniteGroup::symmetric(3);
        let z2 = FiniteGroup::cyclic(2);
        // Sending the 3-cycle to 1 is not a homomorphism.
        assert!(GroupHom::from_generator_images(&s3, &z2, &[0, 1]).is_err());
        let trivial = GroupHom { images: vec![0; 6] };
        assert!(fiber_product(&[s3.clone(), s3], &[trivial.clone(), trivial], &z2).is_err());
    }
}
