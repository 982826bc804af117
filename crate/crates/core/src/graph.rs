//! Bipartite object/user graphs.
//!
//! Objects are indexed `0..n_objects`, users `0..n_users`. Row `j` of the
//! adjacency matrix is `object_users(j)`, column `l` is `user_objects(l)`.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// One collected `(user, object)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRecord {
    pub user: String,
    pub object: String,
}

impl EdgeRecord {
    pub fn new(user: impl Into<String>, object: impl Into<String>) -> Result<Self> {
        let user = user.into();
        let object = object.into();
        if user.is_empty() || object.is_empty() {
            return Err(Error::EmptyToken);
        }
        Ok(EdgeRecord { user, object })
    }
}

/// What to do with zero-degree nodes while building a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IsolatedPolicy {
    /// Zero-degree nodes are an input error.
    #[default]
    Reject,
    /// Zero-degree nodes are removed and the remaining nodes re-indexed in
    /// their original order.
    Drop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    object_users: Vec<Vec<usize>>,
    user_objects: Vec<Vec<usize>>,
    object_degrees: Vec<usize>,
    user_degrees: Vec<usize>,
    object_labels: Vec<String>,
    user_labels: Vec<String>,
    object_index: BTreeMap<String, usize>,
    user_index: BTreeMap<String, usize>,
    edge_count: usize,
}

/// A connected component: sorted object and user index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub objects: Vec<usize>,
    pub users: Vec<usize>,
}

/// A component lifted out as a graph of its own, with the maps from local
/// back to parent indices.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: BipartiteGraph,
    pub objects: Vec<usize>,
    pub users: Vec<usize>,
}

/// Builds a graph from edge records, assigning indices in order of first
/// appearance (objects and users independently).
pub fn build_graph(records: &[EdgeRecord], policy: IsolatedPolicy) -> Result<BipartiteGraph> {
    if records.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut object_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut user_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut object_labels = Vec::new();
    let mut user_labels = Vec::new();
    let mut edges = Vec::with_capacity(records.len());
    for rec in records {
        if rec.user.is_empty() || rec.object.is_empty() {
            return Err(Error::EmptyToken);
        }
        let next = object_index.len();
        let o = *object_index.entry(rec.object.as_str()).or_insert_with(|| {
            object_labels.push(rec.object.clone());
            next
        });
        let next = user_index.len();
        let u = *user_index.entry(rec.user.as_str()).or_insert_with(|| {
            user_labels.push(rec.user.clone());
            next
        });
        edges.push((o, u));
    }
    BipartiteGraph::from_labeled_edges(object_labels, user_labels, &edges, policy)
}

impl BipartiteGraph {
    /// Builds a graph from `(object, user)` index pairs with labels
    /// `o1..on` and `u1..um`.
    pub fn from_edges(
        n_objects: usize,
        n_users: usize,
        edges: &[(usize, usize)],
        policy: IsolatedPolicy,
    ) -> Result<Self> {
        let object_labels = (1..=n_objects).map(|j| format!("o{j}")).collect();
        let user_labels = (1..=n_users).map(|l| format!("u{l}")).collect();
        Self::from_labeled_edges(object_labels, user_labels, edges, policy)
    }

    /// Builds a graph from `(object, user)` index pairs. Duplicate pairs
    /// collapse to one edge.
    pub fn from_labeled_edges(
        object_labels: Vec<String>,
        user_labels: Vec<String>,
        edges: &[(usize, usize)],
        policy: IsolatedPolicy,
    ) -> Result<Self> {
        let n = object_labels.len();
        let m = user_labels.len();
        let mut object_users = vec![Vec::new(); n];
        let mut user_objects = vec![Vec::new(); m];
        for &(o, u) in edges {
            if o >= n {
                return Err(Error::IndexOutOfRange {
                    what: "object",
                    index: o,
                    len: n,
                });
            }
            if u >= m {
                return Err(Error::IndexOutOfRange {
                    what: "user",
                    index: u,
                    len: m,
                });
            }
            object_users[o].push(u);
            user_objects[u].push(o);
        }
        for list in object_users.iter_mut().chain(user_objects.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }

        let isolated_objects: Vec<usize> = (0..n).filter(|&j| object_users[j].is_empty()).collect();
        let isolated_users: Vec<usize> = (0..m).filter(|&l| user_objects[l].is_empty()).collect();
        if isolated_objects.is_empty() && isolated_users.is_empty() {
            if n == 0 || m == 0 {
                return Err(Error::EmptyGraph);
            }
            return Ok(Self::assemble(
                object_users,
                user_objects,
                object_labels,
                user_labels,
            ));
        }
        match policy {
            IsolatedPolicy::Reject => Err(Error::IsolatedNodes {
                objects: isolated_objects
                    .iter()
                    .map(|&j| object_labels[j].clone())
                    .collect(),
                users: isolated_users
                    .iter()
                    .map(|&l| user_labels[l].clone())
                    .collect(),
            }),
            IsolatedPolicy::Drop => {
                let keep_objects: Vec<usize> =
                    (0..n).filter(|&j| !object_users[j].is_empty()).collect();
                let keep_users: Vec<usize> =
                    (0..m).filter(|&l| !user_objects[l].is_empty()).collect();
                if keep_objects.is_empty() {
                    return Err(Error::EmptyGraph);
                }
                Ok(Self::restrict(
                    &object_users,
                    &object_labels,
                    &user_labels,
                    &keep_objects,
                    &keep_users,
                ))
            }
        }
    }

    fn assemble(
        object_users: Vec<Vec<usize>>,
        user_objects: Vec<Vec<usize>>,
        object_labels: Vec<String>,
        user_labels: Vec<String>,
    ) -> Self {
        let object_degrees: Vec<usize> = object_users.iter().map(Vec::len).collect();
        let user_degrees: Vec<usize> = user_objects.iter().map(Vec::len).collect();
        let edge_count = object_degrees.iter().sum();
        let object_index = object_labels
            .iter()
            .enumerate()
            .map(|(j, s)| (s.clone(), j))
            .collect();
        let user_index = user_labels
            .iter()
            .enumerate()
            .map(|(l, s)| (s.clone(), l))
            .collect();
        BipartiteGraph {
            object_users,
            user_objects,
            object_degrees,
            user_degrees,
            object_labels,
            user_labels,
            object_index,
            user_index,
            edge_count,
        }
    }

    /// Induced graph on the kept nodes. Both keep lists must be ascending and
    /// closed under adjacency among themselves for degrees to stay positive.
    fn restrict(
        object_users: &[Vec<usize>],
        object_labels: &[String],
        user_labels: &[String],
        keep_objects: &[usize],
        keep_users: &[usize],
    ) -> Self {
        let mut user_map = vec![usize::MAX; user_labels.len()];
        for (local, &l) in keep_users.iter().enumerate() {
            user_map[l] = local;
        }
        let mut new_object_users = Vec::with_capacity(keep_objects.len());
        let mut new_user_objects = vec![Vec::new(); keep_users.len()];
        for (local_o, &j) in keep_objects.iter().enumerate() {
            let users: Vec<usize> = object_users[j]
                .iter()
                .filter_map(|&l| (user_map[l] != usize::MAX).then_some(user_map[l]))
                .collect();
            for &lu in &users {
                new_user_objects[lu].push(local_o);
            }
            new_object_users.push(users);
        }
        Self::assemble(
            new_object_users,
            new_user_objects,
            keep_objects
                .iter()
                .map(|&j| object_labels[j].clone())
                .collect(),
            keep_users.iter().map(|&l| user_labels[l].clone()).collect(),
        )
    }

    pub fn n_objects(&self) -> usize {
        self.object_users.len()
    }

    pub fn n_users(&self) -> usize {
        self.user_objects.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Users that collected object `j`, ascending.
    pub fn object_users(&self, j: usize) -> &[usize] {
        &self.object_users[j]
    }

    /// Objects collected by user `l`, ascending.
    pub fn user_objects(&self, l: usize) -> &[usize] {
        &self.user_objects[l]
    }

    pub fn object_degree(&self, j: usize) -> usize {
        self.object_degrees[j]
    }

    pub fn user_degree(&self, l: usize) -> usize {
        self.user_degrees[l]
    }

    pub fn object_degrees(&self) -> &[usize] {
        &self.object_degrees
    }

    pub fn user_degrees(&self) -> &[usize] {
        &self.user_degrees
    }

    pub fn object_label(&self, j: usize) -> &str {
        &self.object_labels[j]
    }

    pub fn user_label(&self, l: usize) -> &str {
        &self.user_labels[l]
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn user_labels(&self) -> &[String] {
        &self.user_labels
    }

    pub fn find_object(&self, label: &str) -> Option<usize> {
        self.object_index.get(label).copied()
    }

    pub fn find_user(&self, label: &str) -> Option<usize> {
        self.user_index.get(label).copied()
    }

    /// `a_{jl}`: whether user `l` collected object `j`.
    pub fn has_edge(&self, object: usize, user: usize) -> bool {
        self.user_objects[user].binary_search(&object).is_ok()
    }

    /// All `(object, user)` pairs, object-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.object_users
            .iter()
            .enumerate()
            .flat_map(|(j, users)| users.iter().map(move |&l| (j, l)))
    }

    pub(crate) fn check_user(&self, l: usize) -> Result<()> {
        if l >= self.n_users() {
            return Err(Error::IndexOutOfRange {
                what: "user",
                index: l,
                len: self.n_users(),
            });
        }
        Ok(())
    }

    /// Lifts a component out as a standalone graph. Labels are kept.
    pub fn subgraph(&self, component: &Component) -> Subgraph {
        let graph = Self::restrict(
            &self.object_users,
            &self.object_labels,
            &self.user_labels,
            &component.objects,
            &component.users,
        );
        Subgraph {
            graph,
            objects: component.objects.clone(),
            users: component.users.clone(),
        }
    }

    /// `Disconnected` error unless the graph has exactly one component.
    pub fn require_connected(&self) -> Result<()> {
        let components = connected_components(self);
        if components.len() == 1 {
            return Ok(());
        }
        Err(Error::Disconnected {
            components: components
                .iter()
                .map(|c| {
                    c.objects
                        .iter()
                        .map(|&j| self.object_labels[j].clone())
                        .collect()
                })
                .collect(),
        })
    }
}

/// Breadth-first search over objects and users with undirected edges.
/// Components come out ordered by their smallest object index.
pub fn connected_components(graph: &BipartiteGraph) -> Vec<Component> {
    let n = graph.n_objects();
    let m = graph.n_users();
    let mut object_seen = vec![false; n];
    let mut user_seen = vec![false; m];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..n {
        if object_seen[start] {
            continue;
        }
        let mut objects = Vec::new();
        let mut users = Vec::new();
        object_seen[start] = true;
        queue.push_back(start);
        while let Some(j) = queue.pop_front() {
            objects.push(j);
            for &l in graph.object_users(j) {
                if user_seen[l] {
                    continue;
                }
                user_seen[l] = true;
                users.push(l);
                for &o in graph.user_objects(l) {
                    if !object_seen[o] {
                        object_seen[o] = true;
                        queue.push_back(o);
                    }
                }
            }
        }
        objects.sort_unstable();
        users.sort_unstable();
        components.push(Component { objects, users });
    }
    // Users without objects cannot occur in a built graph, but keep the
    // partition exhaustive regardless.
    for (l, seen) in user_seen.iter().enumerate() {
        if !seen {
            components.push(Component {
                objects: Vec::new(),
                users: vec![l],
            });
        }
    }
    components
}
