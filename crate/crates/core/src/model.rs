//! Dependency graph, dimension checking and the well-formedness judgment.

use std::collections::{BTreeSet, HashMap};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::error::DimensionError;
use crate::expr::{CodataDefinition, DefinitionSet, StreamExpr};

/// Directed graph over atomic names: `a -> b` when `b` occurs in the
/// defining expression of `a`.
#[derive(Clone, Debug)]
pub struct DependencyGraph {
    graph: DiGraph<String, ()>,
    index: HashMap<String, NodeIndex>,
    dangling: Vec<(String, String)>,
}

impl DependencyGraph {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.graph.node_weights().map(String::as_str)
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index.get(from), self.index.get(to)) {
            (Some(&a), Some(&b)) => self.graph.contains_edge(a, b),
            _ => false,
        }
    }

    /// Direct dependencies of `name`, sorted.
    pub fn successors(&self, name: &str) -> Vec<&str> {
        let Some(&a) = self.index.get(name) else { return vec![] };
        let mut out: Vec<&str> = self.graph.neighbors(a).map(|b| self.graph[b].as_str()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Every edge, sorted.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        let mut out: Vec<(&str, &str)> = self
            .graph
            .edge_indices()
            .filter_map(|e| self.graph.edge_endpoints(e))
            .map(|(a, b)| (self.graph[a].as_str(), self.graph[b].as_str()))
            .collect();
        out.sort_unstable();
        out
    }

    /// References to undeclared names, as `(referrer, missing)`.
    pub fn dangling(&self) -> &[(String, String)] {
        &self.dangling
    }

    /// Names reachable from `name` (including itself).
    pub fn reachable(&self, name: &str) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        if let Some(&start) = self.index.get(name) {
            let mut dfs = petgraph::visit::Dfs::new(&self.graph, start);
            while let Some(n) = dfs.next(&self.graph) {
                out.insert(self.graph[n].as_str());
            }
        }
        out
    }

    /// Strongly connected component id of each name.
    fn components(&self) -> HashMap<&str, usize> {
        let mut out = HashMap::new();
        for (i, scc) in tarjan_scc(&self.graph).into_iter().enumerate() {
            for n in scc {
                out.insert(self.graph[n].as_str(), i);
            }
        }
        out
    }
}

/// The expression owning `name`'s elements: its projected component body,
/// or the whole body when it cannot be projected.
fn owned_body<'a>(defs: &'a DefinitionSet, def: &'a CodataDefinition, name: &str) -> &'a StreamExpr {
    defs.component_body(name).unwrap_or(&def.body)
}

pub fn dependency_graph(defs: &DefinitionSet) -> DependencyGraph {
    let mut graph = DiGraph::new();
    let mut index = HashMap::new();
    for n in defs.atomic_names() {
        index.insert(n.to_string(), graph.add_node(n.to_string()));
    }
    let mut dangling = Vec::new();
    for def in defs.definitions() {
        for a in def.name.components() {
            for b in owned_body(defs, def, a).names() {
                match index.get(&b) {
                    Some(&to) => {
                        graph.update_edge(index[a], to, ());
                    }
                    None => dangling.push((a.clone(), b)),
                }
            }
        }
    }
    DependencyGraph { graph, index, dangling }
}

/// Dimension of an expression. Every atomic name has dimension 1.
pub fn dimension(e: &StreamExpr, defs: &DefinitionSet) -> Result<usize, DimensionError> {
    dim(e, &|n| defs.contains(n))
}

fn dim(e: &StreamExpr, known: &impl Fn(&str) -> bool) -> Result<usize, DimensionError> {
    use StreamExpr::*;
    let same = |op: &'static str, left: usize, right: usize| {
        if left == right {
            Ok(left)
        } else {
            Err(DimensionError::Mismatch { op, left, right })
        }
    };
    match e {
        NameTail(n, _) => {
            if known(n) {
                Ok(1)
            } else {
                Err(DimensionError::UnknownName(n.clone()))
            }
        }
        Const(v) => Ok(v.dimension()),
        AddConst(_, v, s) => same("+", v.dimension(), dim(s, known)?),
        MulConst(_, v, s) => {
            let d = dim(s, known)?;
            if v.dimension() == 1 {
                Ok(d)
            } else {
                same("*", v.dimension(), d)
            }
        }
        Add(a, b) => same("+", dim(a, known)?, dim(b, known)?),
        Mul(a, b) => same("*", dim(a, known)?, dim(b, known)?),
        Zip(a, b) => same("zip", dim(a, known)?, dim(b, known)?),
        Pairing(items) => items.iter().map(|i| dim(i, known)).sum(),
        Map(_, items) => {
            for i in items {
                dim(i, known)?;
            }
            Ok(1)
        }
        Even(s) | Odd(s) | Shifted(s, _) => dim(s, known),
        DynamicTail(s, k) => {
            same("^", 1, dim(k, known)?)?;
            dim(s, known)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    WellFormed,
    Violations,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: u8,
    pub definition: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WellFormedReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
}

impl WellFormedReport {
    pub fn is_well_formed(&self) -> bool {
        self.verdict == Verdict::WellFormed
    }
}

/// Checks the four well-formedness conditions for every definition.
///
/// Condition 4 bounds tail depth only for references that can lead back
/// to the referring name (same strongly connected component); a tail of a
/// name defined independently is always computable.
pub fn check_well_formed(defs: &DefinitionSet) -> WellFormedReport {
    let graph = dependency_graph(defs);
    let scc = graph.components();
    let mut violations = Vec::new();
    for def in defs.definitions() {
        let name = def.name.to_string();
        let mut push = |condition: u8, message: String| {
            violations.push(Violation { condition, definition: name.clone(), message })
        };

        let m = def.dimension();
        if def.base_cases.is_empty() {
            push(1, "at least one base case is required".into());
        }
        for (i, b) in def.base_cases.iter().enumerate() {
            if b.dimension() != m {
                push(
                    1,
                    format!("base case {i} `{b}` has arity {} but the name has arity {m}", b.dimension()),
                );
            }
        }

        match dim(&def.body, &|_| true) {
            Ok(d) if d != m => push(2, format!("body has dimension {d} but the name has dimension {m}")),
            Ok(_) => {}
            Err(e) => push(2, format!("body is ill-typed: {e}")),
        }

        for n in def.body.names() {
            if !defs.contains(&n) {
                push(3, format!("`{n}` is not defined"));
            }
        }

        let mut seen = BTreeSet::new();
        if def.body.contains_dynamic_tail() {
            push(4, "tail exponent is a stream, not a numeral".into());
        }
        for a in def.name.components() {
            let mut tails = Vec::new();
            collect_tails(owned_body(defs, def, a), 0, &mut tails);
            for (t, k) in tails {
                let Some((tdef, _)) = defs.lookup(&t) else { continue };
                if scc.get(t.as_str()) != scc.get(a.as_str()) || tdef.base_len() > k {
                    continue;
                }
                if seen.insert((t.clone(), k)) {
                    push(
                        4,
                        format!(
                            "`{t}^{k}` needs at least {} base cases for `{t}`, found {}",
                            k + 1,
                            tdef.base_len()
                        ),
                    );
                }
            }
        }
    }
    let verdict = if violations.is_empty() { Verdict::WellFormed } else { Verdict::Violations };
    WellFormedReport { verdict, violations }
}

/// Tail references with their effective depth, folding `(e)^k` shifts.
fn collect_tails(e: &StreamExpr, offset: u64, out: &mut Vec<(String, u64)>) {
    match e {
        StreamExpr::NameTail(n, k) => out.push((n.clone(), k.saturating_add(offset))),
        StreamExpr::Shifted(inner, k) => collect_tails(inner, offset.saturating_add(*k), out),
        StreamExpr::DynamicTail(base, _) => collect_tails(base, offset, out),
        other => {
            for c in other.children() {
                collect_tails(c, offset, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_definitions, parse_stream_expr, ParseOptions, SourceText};

    fn defs(src: &str) -> DefinitionSet {
        let opts = ParseOptions { allow_stream_exponent: true };
        parse_definitions(&SourceText::repl(src), opts).unwrap()
    }

    #[test]
    fn fib_has_a_self_loop() {
        let d = defs("fib as [0, 1 | fib + fib^1]");
        let g = dependency_graph(&d);
        assert_eq!(g.edges(), vec![("fib", "fib")]);
        assert!(check_well_formed(&d).is_well_formed());
    }

    #[test]
    fn compound_edges_are_componentwise() {
        let g = dependency_graph(&defs("(f, g) as [(0, 1) | (g, 2*f)]"));
        assert_eq!(g.edges(), vec![("f", "g"), ("g", "f")]);
    }

    #[test]
    fn dangling_names_are_recorded_then_reported() {
        let d = defs("a as [0 | b]");
        assert_eq!(dependency_graph(&d).dangling(), &[("a".to_string(), "b".to_string())]);
        let r = check_well_formed(&d);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].condition, 3);
    }

    #[test]
    fn deep_self_tail_violates_condition_four() {
        let r = check_well_formed(&defs("bad as [0 | bad^1 + bad^2]"));
        assert!(r.violations.iter().all(|v| v.condition == 4));
        assert!(r.violations.iter().any(|v| v.message.contains("bad^2")));
    }

    #[test]
    fn tails_of_independent_names_are_unconstrained() {
        let d = defs("nat as [0 | 1 + nat]\nfact as [1 | nat^1 * fact]");
        assert!(check_well_formed(&d).is_well_formed());
    }

    #[test]
    fn hofstadter_is_rejected() {
        let d = defs("(nat, f, m) as [(0, 1, 0) | (1 + nat, nat - m^f, nat - f^m)]");
        let r = check_well_formed(&d);
        assert_eq!(r.verdict, Verdict::Violations);
        assert!(r.violations.iter().any(|v| v.condition == 4));
    }

    #[test]
    fn arity_and_dimension_checks() {
        let r = check_well_formed(&defs("(f, g) as [0 | (g, f)]"));
        assert_eq!(r.violations[0].condition, 1);
        let r = check_well_formed(&defs("(f, g) as [(0, 1) | f]"));
        assert_eq!(r.violations[0].condition, 2);
    }

    #[test]
    fn dimensions() {
        let d = defs("fib as [0, 1 | fib + fib^1]\no2 as [0, 1 | o2]\no3 as [0, 1, 2 | o3]");
        let e = |s: &str| parse_stream_expr(s).unwrap();
        assert_eq!(dimension(&e("fib"), &d), Ok(1));
        assert_eq!(dimension(&e("(o2, o3)"), &d), Ok(2));
        let err = dimension(&e("fib + (o2, o3)"), &d).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch 1 vs 2"));
    }

    #[test]
    fn report_json_shape() {
        let r = check_well_formed(&defs("fib as [0, 1 | fib + fib^1]"));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json, serde_json::json!({"verdict": "well_formed", "violations": []}));
    }
}
