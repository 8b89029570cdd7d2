/// Lowest common ancestors by Euler tour and a sparse table of minimum depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Lca {
    first: Vec<usize>,
    euler: Vec<usize>,
    depth: Vec<usize>,
    // table[k][i]: index into `euler` of the shallowest entry in euler[i .. i + 2^k].
    table: Vec<Vec<usize>>,
}

impl Lca {
    /// `parent[x]` is `None` only for `root`.
    pub fn new(parent: &[Option<usize>], root: usize) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        for (x, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(x);
            }
        }
        let mut depth = vec![0; n];
        let mut first = vec![usize::MAX; n];
        let mut euler = Vec::with_capacity(2 * n);
        // Iterative DFS: (node, next child index).
        let mut stack = vec![(root, 0usize)];
        first[root] = 0;
        euler.push(root);
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if let Some(&c) = children[x].get(*next) {
                *next += 1;
                depth[c] = depth[x] + 1;
                first[c] = euler.len();
                euler.push(c);
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push(p);
                }
            }
        }

        let len = euler.len();
        let mut table = vec![(0..len).collect::<Vec<_>>()];
        let mut k = 1;
        while (1 << k) <= len {
            let prev = &table[k - 1];
            let half = 1 << (k - 1);
            let row = (0..=len - (1 << k))
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + half]);
                    if depth[euler[b]] < depth[euler[a]] { b } else { a }
                })
                .collect();
            table.push(row);
            k += 1;
        }
        Lca { first, euler, depth, table }
    }

    pub fn depth(&self, x: usize) -> usize {
        self.depth[x]
    }

    pub fn lca(&self, a: usize, b: usize) -> usize {
        let (mut i, mut j) = (self.first[a], self.first[b]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let k = (usize::BITS - 1 - (j - i + 1).leading_zeros()) as usize;
        let (x, y) = (self.table[k][i], self.table[k][j + 1 - (1 << k)]);
        let (x, y) = (self.euler[x], self.euler[y]);
        if self.depth[y] < self.depth[x] { y } else { x }
    }
}
