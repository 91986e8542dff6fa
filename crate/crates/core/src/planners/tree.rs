use crate::geometry::Point;
use crate::gridworld::{segment_collision_free, GridMap};

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub position: Point,
    pub parent: Option<usize>,
    /// Path length from the root.
    pub cost: f64,
}

/// Search tree rooted at node 0. Children lists are kept alongside parent
/// links so cost changes can be pushed down a subtree.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<Node>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    pub fn new(root: Point) -> Self {
        Self {
            nodes: vec![Node {
                position: root,
                parent: None,
                cost: 0.0,
            }],
            children: vec![Vec::new()],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn position(&self, i: usize) -> Point {
        self.nodes[i].position
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.nodes[i].cost
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    /// Appends a node under `parent` with cost `parent.cost + edge length`.
    pub fn add(&mut self, position: Point, parent: usize) -> usize {
        let cost = self.nodes[parent].cost + self.nodes[parent].position.dist(position);
        let id = self.nodes.len();
        self.nodes.push(Node {
            position,
            parent: Some(parent),
            cost,
        });
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    /// Moves `node` under `new_parent` and refreshes the cost of every
    /// descendant. Returns the change in `node`'s cost.
    pub fn reparent(&mut self, node: usize, new_parent: usize) -> f64 {
        let old = self.nodes[node].cost;
        if let Some(p) = self.nodes[node].parent {
            self.children[p].retain(|&c| c != node);
        }
        self.nodes[node].parent = Some(new_parent);
        self.children[new_parent].push(node);

        let mut stack = vec![node];
        while let Some(n) = stack.pop() {
            let parent = self.nodes[n].parent.expect("non-root node has a parent");
            self.nodes[n].cost = self.nodes[parent].cost + self.nodes[parent].position.dist(self.nodes[n].position);
            stack.extend(self.children[n].iter().copied());
        }
        self.nodes[node].cost - old
    }

    /// Positions from the root to `node`, inclusive.
    pub fn path_to(&self, node: usize) -> Vec<Point> {
        let mut out = Vec::new();
        let mut cur = Some(node);
        while let Some(n) = cur {
            out.push(self.nodes[n].position);
            cur = self.nodes[n].parent;
        }
        out.reverse();
        out
    }

    /// Checks cost consistency, acyclicity and (when a map is given)
    /// collision-freedom of every edge.
    pub fn validate(&self, map: Option<&GridMap>) -> Result<(), String> {
        let root = &self.nodes[0];
        if root.parent.is_some() || root.cost != 0.0 {
            return Err("root must have no parent and zero cost".into());
        }
        let n = self.nodes.len();
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            let p = node.parent.ok_or_else(|| format!("node {i} has no parent"))?;
            if p >= n {
                return Err(format!("node {i} has dangling parent {p}"));
            }
            let parent = &self.nodes[p];
            let expected = parent.cost + parent.position.dist(node.position);
            if (node.cost - expected).abs() >= 1e-9 {
                return Err(format!("node {i}: cost {} but parent chain gives {expected}", node.cost));
            }
            if let Some(map) = map {
                if !segment_collision_free(map, parent.position, node.position) {
                    return Err(format!("edge {p} -> {i} collides"));
                }
            }
        }
        // every node must reach the root within n steps
        let mut depth_known = vec![false; n];
        depth_known[0] = true;
        for start in 1..n {
            let mut chain = Vec::new();
            let mut cur = start;
            while !depth_known[cur] {
                chain.push(cur);
                if chain.len() > n {
                    return Err(format!("cycle through node {start}"));
                }
                cur = self.nodes[cur].parent.expect("checked above");
            }
            for c in chain {
                depth_known[c] = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reparent_pushes_cost_change_to_descendants() {
        let mut t = Tree::new(Point::new(0.0, 0.0));
        let a = t.add(Point::new(0.0, 10.0), 0);
        let b = t.add(Point::new(10.0, 10.0), a);
        let c = t.add(Point::new(12.0, 10.0), b);
        let d = t.add(Point::new(12.0, 14.0), c);
        let before: Vec<f64> = [c, d].iter().map(|&i| t.cost(i)).collect();
        let delta = t.reparent(b, 0);
        assert!((t.cost(b) - 200f64.sqrt()).abs() < 1e-12);
        assert!(delta < 0.0);
        for (k, &i) in [c, d].iter().enumerate() {
            assert!((t.cost(i) - (before[k] + delta)).abs() < 1e-9);
        }
        assert_eq!(t.children(a), &[] as &[usize]);
        assert_eq!(t.children(0), &[a, b]);
        t.validate(None).unwrap();
    }

    #[test]
    fn validate_catches_cost_drift() {
        let mut t = Tree::new(Point::new(0.0, 0.0));
        t.add(Point::new(3.0, 4.0), 0);
        t.nodes[1].cost = 5.1;
        assert!(t.validate(None).is_err());
    }

    #[test]
    fn validate_catches_cycles() {
        let mut t = Tree::new(Point::new(0.0, 0.0));
        let a = t.add(Point::new(1.0, 0.0), 0);
        let b = t.add(Point::new(2.0, 0.0), a);
        t.nodes[a].parent = Some(b);
        t.nodes[a].cost = t.nodes[b].cost + 1.0;
        assert!(t.validate(None).is_err());
    }

    #[test]
    fn validate_catches_colliding_edge() {
        let mut map = GridMap::new(10, 10);
        map.set_occupied(0, 5, true);
        let mut t = Tree::new(Point::new(0.5, 0.5));
        t.add(Point::new(8.5, 0.5), 0);
        assert!(t.validate(Some(&map)).is_err());
    }

    #[test]
    fn path_to_root_order() {
        let mut t = Tree::new(Point::new(0.0, 0.0));
        let a = t.add(Point::new(1.0, 0.0), 0);
        let b = t.add(Point::new(1.0, 1.0), a);
        assert_eq!(
            t.path_to(b),
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)]
        );
    }
}
