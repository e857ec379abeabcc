use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::{DenseMatrix, SparseMatrix};

/// Undirected simple graph with optional node features and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    pub features: Option<DenseMatrix>,
    pub labels: Option<Vec<usize>>,
}

/// What canonicalization did to the raw edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

impl Graph {
    /// Canonicalizes edges to `u < v`, drops self-loops and collapses duplicates.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<(Self, LoadReport)> {
        let mut report = LoadReport::default();
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) has an endpoint >= n = {n}")));
            }
            if u == v {
                report.self_loops_dropped += 1;
                continue;
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        report.duplicates_collapsed = before - canon.len();
        Ok((Self { n, edges: canon, features: None, labels: None }, report))
    }

    /// Builds a graph from edges already known to be clean; panics otherwise.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges(n, edges).expect("valid edge list").0
    }

    pub fn with_features(mut self, features: DenseMatrix) -> Result<Self> {
        if features.rows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "feature matrix has {} rows, graph has {} nodes",
                features.rows(),
                self.n
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted, deduplicated `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor lists.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Symmetric 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> SparseMatrix {
        let trip = self.edges.iter().flat_map(|&(u, v)| [(u, v, 1.0), (v, u, 1.0)]);
        SparseMatrix::from_triplets(self.n, self.n, trip).expect("edges in range")
    }

    pub fn num_classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| l.iter().max().map_or(0, |m| m + 1))
    }

    /// Relabels node `v` as `perm[v]`, carrying features and labels along.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let (mut g, _) = Self::from_edges(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))?;
        if let Some(x) = &self.features {
            let mut y = DenseMatrix::zeros(x.rows(), x.cols());
            for v in 0..self.n {
                y.row_mut(perm[v]).copy_from_slice(x.row(v));
            }
            g.features = Some(y);
        }
        if let Some(l) = &self.labels {
            let mut y = vec![0; self.n];
            for v in 0..self.n {
                y[perm[v]] = l[v];
            }
            g.labels = Some(y);
        }
        Ok(g)
    }
}

/// Reads an edge TSV (`u<TAB>v` per line, optional `#n=<count>` first line) and
/// optional row-aligned feature/label CSVs.
///
/// A label file may start with `#classes=<C>`; every label must then be `< C`.
pub fn load_graph(
    edge_path: &Path,
    feature_path: Option<&Path>,
    label_path: Option<&Path>,
) -> Result<(Graph, LoadReport)> {
    let text = fs::read_to_string(edge_path).map_err(|e| Error::io(edge_path, e))?;
    let mut declared_n = None;
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if let Some(count) = rest.trim().strip_prefix("n=") {
                if raw.is_empty() && declared_n.is_none() {
                    declared_n = Some(count.trim().parse::<usize>().map_err(|_| {
                        Error::parse(edge_path, lineno, format!("bad node-count header {trimmed:?}"))
                    })?);
                    continue;
                }
                return Err(Error::parse(edge_path, lineno, "node-count header must be the first line"));
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(edge_path, lineno, format!("expected two node ids, got {trimmed:?}")));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(edge_path, lineno, format!("{s:?} is not a non-negative integer")))
        };
        raw.push((parse(a)?, parse(b)?));
    }
    let max_id = raw.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared_n {
        Some(d) if d < max_id => {
            return Err(Error::parse(edge_path, 1, format!("header declares n={d} but node id {} appears", max_id - 1)))
        }
        Some(d) => d,
        None => max_id,
    };
    let (mut g, report) = Graph::from_edges(n, raw)?;
    if report.self_loops_dropped > 0 {
        log::warn!("{}: dropped {} self-loop(s)", edge_path.display(), report.self_loops_dropped);
    }

    if let Some(path) = feature_path {
        g = g.with_features(read_features(path, n)?)?;
    }
    if let Some(path) = label_path {
        g = g.with_labels(read_labels(path, n)?)?;
    }
    Ok((g, report))
}

fn read_features(path: &Path, n: usize) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, i + 1, format!("bad feature value {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(path, i + 1, format!("expected {} columns, got {}", first.len(), row.len())));
            }
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(Error::parse(path, rows.len(), format!("{} feature rows for {n} nodes", rows.len())));
    }
    DenseMatrix::from_rows(&rows)
}

fn read_labels(path: &Path, n: usize) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut classes = None;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(c) = rest.trim().strip_prefix("classes=") {
                classes = Some(c.trim().parse::<usize>().map_err(|_| Error::parse(path, i + 1, "bad class header"))?);
            }
            continue;
        }
        let y = t
            .parse::<usize>()
            .map_err(|_| Error::parse(path, i + 1, format!("{t:?} is not a class id")))?;
        if let Some(c) = classes {
            if y >= c {
                return Err(Error::parse(path, i + 1, format!("label {y} outside declared range 0..{c}")));
            }
        }
        labels.push(y);
    }
    if labels.len() != n {
        return Err(Error::parse(path, labels.len(), format!("{} labels for {n} nodes", labels.len())));
    }
    Ok(labels)
}

/// Writes `#n=<count>` followed by one `u<TAB>v` line per edge.
pub fn write_edges(g: &Graph, path: &Path) -> Result<()> {
    let mut out = format!("#n={}\n", g.node_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u}\t{v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn canonicalizes_and_drops_self_loops() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "e.tsv", "0 1\n1 0\n1 1\n");
        let (g, report) = load_graph(&p, None, None).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
        assert_eq!(report.self_loops_dropped, 1);
        assert_eq!(report.duplicates_collapsed, 1);
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn header_declares_isolated_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "e.tsv", "#n=3\n");
        let (g, _) = load_graph(&p, None, None).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 0));
    }

    #[test]
    fn k4_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "k4.tsv", "0\t1\n0\t2\n0\t3\n1\t2\n1\t3\n2\t3\n");
        let (g, _) = load_graph(&p, None, None).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 6));
    }

    #[test]
    fn reports_line_numbers_and_alignment_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "bad.tsv", "0\t1\n1\tx\n");
        match load_graph(&p, None, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let e = write(&dir, "e.tsv", "0\t1\n1\t2\n");
        let f = write(&dir, "f.csv", "1,0\n0,1\n");
        assert!(matches!(load_graph(&e, Some(&f), None), Err(Error::Parse { .. })));
        let l = write(&dir, "l.csv", "#classes=2\n0\n1\n2\n");
        assert!(matches!(load_graph(&e, None, Some(&l)), Err(Error::Parse { line: 4, .. })));
        let l_ok = write(&dir, "l2.csv", "0\n1\n1\n");
        let f_ok = write(&dir, "f2.csv", "1,0\n0,1\n0.5,0.5\n");
        let (g, _) = load_graph(&e, Some(&f_ok), Some(&l_ok)).unwrap();
        assert_eq!(g.labels.as_deref(), Some(&[0, 1, 1][..]));
        assert_eq!(g.features.unwrap().get(2, 1), 0.5);
    }

    #[test]
    fn permutation_carries_attributes() {
        let g = Graph::new(3, [(0, 1), (1, 2)])
            .with_labels(vec![5, 6, 7])
            .unwrap()
            .with_features(DenseMatrix::from_fn(3, 1, |r, _| r as f64))
            .unwrap();
        let h = g.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(h.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(h.labels.as_deref(), Some(&[6, 7, 5][..]));
        assert_eq!(h.features.unwrap().column(0), vec![1.0, 2.0, 0.0]);
    }
}
