//! Immutable abstract simplicial complexes on the vertex set `{0, …, n-1}`.
//!
//! Faces are stored per dimension as ascending vertex tuples, each level in
//! lexicographic order. Every label below `vertex_count` is a 0-face, so a
//! complex built from facets carries its isolated vertices explicitly. Use
//! [`SimplicialComplex::pattern`] to build a complex on exactly the vertices
//! its facets mention.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed;
use crate::error::{Error, Result};

/// An ascending tuple of distinct vertex labels.
pub type Simplex = Vec<usize>;

/// `(s_0, s_1, …, s_dim)`: the number of faces in each dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplexCounts(pub Vec<u64>);

impl SimplexCounts {
    /// `s_i`, zero past the top dimension.
    pub fn get(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    vertex_count: usize,
    /// `faces[i]` holds the i-faces, sorted.
    faces: Vec<Vec<Simplex>>,
}

/// On-disk form: `{"n": int, "facets": [[int, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub n: usize,
    pub facets: Vec<Vec<usize>>,
}

fn check_face(n: usize, face: &[usize]) -> Result<Simplex> {
    if let Some(&label) = face.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidVertex { label, n });
    }
    let mut sorted = face.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::MalformedFacet(face.to_vec()));
    }
    Ok(sorted)
}

/// All faces of `face` (itself included) with at least two vertices.
fn closure_into(face: &[usize], levels: &mut Vec<BTreeSet<Simplex>>) {
    let k = face.len();
    assert!(k < usize::BITS as usize, "facet too large to close");
    for mask in 1u64..(1u64 << k) {
        let size = mask.count_ones() as usize;
        if size < 2 {
            continue;
        }
        let sub: Simplex = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| face[i]).collect();
        if levels.len() < size {
            levels.resize_with(size, BTreeSet::new);
        }
        levels[size - 1].insert(sub);
    }
}

impl SimplicialComplex {
    /// Downward closure of `facets` on the vertex set `{0, …, n-1}`.
    pub fn from_facets<F: AsRef<[usize]>>(n: usize, facets: &[F]) -> Result<Self> {
        let mut levels: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new()];
        for facet in facets {
            let face = check_face(n, facet.as_ref())?;
            closure_into(&face, &mut levels);
        }
        Ok(Self::from_upper_levels(n, levels.into_iter().skip(1).map(|l| l.into_iter().collect()).collect()))
    }

    /// Complex on exactly the vertices mentioned by `facets`, relabelled to
    /// `0..s_0` in increasing order of the original labels.
    pub fn pattern<F: AsRef<[usize]>>(facets: &[F]) -> Result<Self> {
        let labels: BTreeSet<usize> = facets.iter().flat_map(|f| f.as_ref().iter().copied()).collect();
        let index = |v: usize| labels.range(..v).count();
        let relabelled: Vec<Vec<usize>> =
            facets.iter().map(|f| f.as_ref().iter().map(|&v| index(v)).collect()).collect();
        for (orig, new) in facets.iter().zip(&relabelled) {
            let mut s = new.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedFacet(orig.as_ref().to_vec()));
            }
        }
        Self::from_facets(labels.len(), &relabelled)
    }

    /// Builds a complex from an explicit face list, rejecting it unless it is
    /// downward closed. Vertices `0..n` are always present.
    pub fn from_faces<F: AsRef<[usize]>>(n: usize, faces: &[F]) -> Result<Self> {
        let mut levels: Vec<BTreeSet<Simplex>> = Vec::new();
        for face in faces {
            let f = check_face(n, face.as_ref())?;
            if f.len() < 2 {
                continue;
            }
            if levels.len() < f.len() - 1 {
                levels.resize_with(f.len() - 1, BTreeSet::new);
            }
            levels[f.len() - 2].insert(f);
        }
        let complex = Self::from_upper_levels(n, levels.into_iter().map(|l| l.into_iter().collect()).collect());
        if let Some(face) = complex.first_unclosed_face() {
            return Err(Error::NotDownwardClosed(face));
        }
        Ok(complex)
    }

    /// `upper[d-1]` holds the sorted d-faces for `d ≥ 1`; closure is the
    /// caller's responsibility.
    pub(crate) fn from_upper_levels(n: usize, mut upper: Vec<Vec<Simplex>>) -> Self {
        while upper.last().is_some_and(|l| l.is_empty()) {
            upper.pop();
        }
        let mut faces = Vec::with_capacity(upper.len() + 1);
        faces.push((0..n).map(|v| vec![v]).collect());
        faces.extend(upper);
        if n == 0 {
            faces.clear();
        }
        Self { vertex_count: n, faces }
    }

    /// The full k-simplex on `k + 1` vertices.
    pub fn simplex(k: usize) -> Self {
        let facet: Vec<usize> = (0..=k).collect();
        Self::from_facets(k + 1, &[facet]).expect("valid simplex")
    }

    /// The boundary of the k-simplex: all of its proper faces.
    pub fn simplex_boundary(k: usize) -> Self {
        let facets: Vec<Vec<usize>> = (0..=k).map(|skip| (0..=k).filter(|&v| v != skip).collect()).collect();
        Self::from_facets(k + 1, &facets).expect("valid boundary")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.faces.len().checked_sub(1)
    }

    /// The i-faces in canonical order (empty slice past the top dimension).
    pub fn faces(&self, i: usize) -> &[Simplex] {
        self.faces.get(i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &[Simplex])> {
        self.faces.iter().enumerate().map(|(i, l)| (i, l.as_slice()))
    }

    /// Membership test for an ascending vertex tuple.
    pub fn contains(&self, face: &[usize]) -> bool {
        match face.len() {
            0 => false,
            1 => face[0] < self.vertex_count,
            len => self.faces(len - 1).binary_search_by(|f| f.as_slice().cmp(face)).is_ok(),
        }
    }

    pub fn simplex_counts(&self) -> SimplexCounts {
        SimplexCounts(self.faces.iter().map(|l| l.len() as u64).collect())
    }

    pub fn face_count(&self) -> usize {
        self.faces.iter().map(Vec::len).sum()
    }

    /// Faces of dimension ≤ i.
    pub fn skeleton(&self, i: usize) -> Self {
        Self { vertex_count: self.vertex_count, faces: self.faces.iter().take(i + 1).cloned().collect() }
    }

    /// Maximal faces, by dimension then lexicographically.
    pub fn facets(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (d, level) in self.faces.iter().enumerate() {
            let covered: HashSet<Simplex> = self
                .faces
                .get(d + 1)
                .map(|up| up.iter().flat_map(|f| boundary_faces(f)).collect())
                .unwrap_or_default();
            out.extend(level.iter().filter(|f| !covered.contains(*f)).cloned());
        }
        out
    }

    /// `degrees[v][i]` = number of i-faces containing `v`, for `i ≥ 1`
    /// (index 0 is unused and left at zero).
    pub fn vertex_degrees(&self) -> Vec<Vec<u32>> {
        let dims = self.faces.len();
        let mut deg = vec![vec![0u32; dims.max(1)]; self.vertex_count];
        for (d, level) in self.faces.iter().enumerate().skip(1) {
            for f in level {
                for &v in f {
                    deg[v][d] += 1;
                }
            }
        }
        deg
    }

    /// Adds `face` and all of its faces.
    pub fn with_face(&self, face: &[usize]) -> Result<Self> {
        let mut facets = self.facets();
        facets.push(check_face(self.vertex_count, face)?);
        Self::from_facets(self.vertex_count, &facets)
    }

    /// Image under a vertex bijection `perm` (new label of `v` is `perm[v]`).
    pub fn relabelled(&self, perm: &[usize]) -> Result<Self> {
        let facets: Vec<Vec<usize>> = self.facets().iter().map(|f| f.iter().map(|&v| perm[v]).collect()).collect();
        Self::from_facets(self.vertex_count, &facets)
    }

    /// The first stored face whose boundary is incomplete, if any.
    pub fn first_unclosed_face(&self) -> Option<Simplex> {
        for level in self.faces.iter().skip(1) {
            for f in level {
                if f.iter().any(|&v| v >= self.vertex_count) {
                    return Some(f.clone());
                }
                if boundary_faces(f).any(|b| !self.contains(&b)) {
                    return Some(f.clone());
                }
            }
        }
        None
    }

    pub fn is_downward_closed(&self) -> bool {
        self.first_unclosed_face().is_none()
    }

    /// Vertex labels that lie in no positive-dimensional face.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        let deg = self.vertex_degrees();
        (0..self.vertex_count).filter(|&v| deg[v].iter().all(|&d| d == 0)).collect()
    }

    /// Number of vertex permutations preserving the face set.
    pub fn automorphism_count(&self) -> u64 {
        embed::automorphism_count(self)
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        embed::are_isomorphic(self, other)
    }

    pub fn to_file(&self) -> ComplexFile {
        ComplexFile { n: self.vertex_count, facets: self.facets().into_iter().filter(|f| f.len() > 1).collect() }
    }

    pub fn from_file(file: &ComplexFile) -> Result<Self> {
        Self::from_facets(file.n, &file.facets)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ComplexFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("complex serialises")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }

    /// Compact facet notation, e.g. `0-1 1-2` for a path.
    pub fn facet_label(&self) -> String {
        let facets = self.facets();
        if facets.is_empty() {
            return "empty".into();
        }
        facets
            .iter()
            .map(|f| f.iter().map(usize::to_string).collect::<Vec<_>>().join("-"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Codimension-one faces of `face`, each ascending.
pub fn boundary_faces(face: &[usize]) -> impl Iterator<Item = Simplex> + '_ {
    (0..face.len()).filter(move |_| face.len() > 1).map(move |skip| {
        face.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
    })
}

impl fmt::Display for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K(n={}; {})", self.vertex_count, self.facet_label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hollow_triangle() -> SimplicialComplex {
        SimplicialComplex::from_facets(3, &[[0, 1], [1, 2], [0, 2]]).unwrap()
    }

    #[test]
    fn full_triangle_counts() {
        let k = SimplicialComplex::from_facets(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(k.simplex_counts().0, vec![3, 3, 1]);
        assert_eq!(k, SimplicialComplex::simplex(2));
    }

    #[test]
    fn hollow_triangle_counts() {
        assert_eq!(hollow_triangle().simplex_counts().0, vec![3, 3]);
    }

    #[test]
    fn out_of_range_label() {
        assert_eq!(
            SimplicialComplex::from_facets(2, &[[0, 1, 2]]),
            Err(Error::InvalidVertex { label: 2, n: 2 })
        );
    }

    #[test]
    fn repeated_label() {
        assert!(matches!(SimplicialComplex::from_facets(3, &[[0, 1, 1]]), Err(Error::MalformedFacet(_))));
    }

    #[test]
    fn tetrahedron_boundary_counts() {
        assert_eq!(SimplicialComplex::simplex_boundary(3).simplex_counts().0, vec![4, 6, 4]);
    }

    #[test]
    fn vertices_only() {
        let empty: [[usize; 0]; 0] = [];
        let k = SimplicialComplex::from_facets(5, &empty).unwrap();
        assert_eq!(k.simplex_counts().0, vec![5]);
        assert_eq!(k.dimension(), Some(0));
        let nothing = SimplicialComplex::from_facets(0, &empty).unwrap();
        assert_eq!(nothing.dimension(), None);
        assert!(nothing.simplex_counts().is_empty());
    }

    #[test]
    fn skeletons() {
        let s2 = SimplicialComplex::simplex(2);
        assert_eq!(s2.skeleton(1), hollow_triangle());
        assert_eq!(s2.skeleton(2), s2);
        assert_eq!(s2.skeleton(7), s2);
        let k4 = SimplicialComplex::simplex_boundary(3).skeleton(1);
        assert_eq!(k4.simplex_counts().0, vec![4, 6]);
    }

    #[test]
    fn facets_and_membership() {
        let k = SimplicialComplex::from_facets(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap();
        assert_eq!(k.facets(), vec![vec![2, 3], vec![0, 1, 2]]);
        assert!(k.contains(&[0, 2]));
        assert!(!k.contains(&[1, 3]));
        assert!(k.contains(&[3]));
        assert!(!k.contains(&[4]));
    }

    #[test]
    fn pattern_compacts_labels() {
        let p = SimplicialComplex::pattern(&[[3, 7], [7, 9]]).unwrap();
        assert_eq!(p.vertex_count(), 3);
        assert_eq!(p.facets(), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn from_faces_requires_closure() {
        assert!(matches!(
            SimplicialComplex::from_faces(3, &[vec![0, 1, 2], vec![0, 1]]),
            Err(Error::NotDownwardClosed(_))
        ));
        let ok = SimplicialComplex::from_faces(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(ok.simplex_counts().0, vec![3, 2]);
    }

    #[test]
    fn json_round_trip() {
        let k = SimplicialComplex::from_facets(5, &[vec![0, 1, 2], vec![3, 4]]).unwrap();
        let text = k.to_json_string();
        assert_eq!(text, r#"{"n":5,"facets":[[3,4],[0,1,2]]}"#);
        assert_eq!(SimplicialComplex::from_json_str(&text).unwrap(), k);
        assert!(SimplicialComplex::from_json_str(r#"{"n":2,"facets":[[0,5]]}"#).is_err());
    }

    #[test]
    fn with_face_adds_closure() {
        let k = hollow_triangle().with_face(&[0, 1, 2]).unwrap();
        assert_eq!(k, SimplicialComplex::simplex(2));
    }

    #[test]
    fn isolated() {
        let k = SimplicialComplex::from_facets(4, &[[0, 2]]).unwrap();
        assert_eq!(k.isolated_vertices(), vec![1, 3]);
    }
}
