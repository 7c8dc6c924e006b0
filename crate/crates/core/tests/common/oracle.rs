//! Brute-force linear entailment by vertex enumeration, used as an
//! independent reference for `entails_linear`.
//!
//! `A |= g` iff `A` together with any disjunct of `not g` is infeasible.
//! Strict rows `a.x < b` are relaxed to `a.x + t <= b` with `0 <= t <= 1`;
//! the system is feasible iff the bounded polytope has a vertex with `t > 0`
//! (or any vertex when there are no strict rows). A large box bounds `x`;
//! with small integer data every basic solution lies well inside it.

use corec::proof::linear::{constraint, LinearConstraint, Relation};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOX: i64 = 1_000_000_000;

/// `coeffs . x <= bound`, strict when `strict`.
#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<BigRational>,
    bound: BigRational,
    strict: bool,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Rewrites `constant + c.x rel 0` as rows over `vars` variables.
fn rows_of(c: &LinearConstraint, vars: usize) -> Vec<Row> {
    let coeffs: Vec<BigRational> = (0..vars).map(|i| c.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)).collect();
    let neg: Vec<BigRational> = coeffs.iter().map(|x| -x).collect();
    let le = |cs: &Vec<BigRational>, k: &BigRational, strict| Row { coeffs: cs.clone(), bound: k.clone(), strict };
    // c.x + k <= 0  <=>  c.x <= -k ;  c.x + k >= 0  <=>  -c.x <= k
    let minus_k = -&c.constant;
    match c.relation {
        Relation::Le => vec![le(&coeffs, &minus_k, false)],
        Relation::Lt => vec![le(&coeffs, &minus_k, true)],
        Relation::Ge => vec![le(&neg, &c.constant, false)],
        Relation::Gt => vec![le(&neg, &c.constant, true)],
        Relation::Eq => vec![le(&coeffs, &minus_k, false), le(&neg, &c.constant, false)],
    }
}

/// Solves the square system `m x = rhs`; `None` if singular.
fn solve(mut m: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = m[col][col].clone();
        for x in &mut m[col][col..] {
            *x = &*x / &p;
        }
        rhs[col] = &rhs[col] / &p;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (x, pv) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= pv * &f;
                }
                let v = &rhs[col] * &f;
                rhs[r] -= v;
            }
        }
    }
    Some(rhs)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Feasibility of a conjunction of constraints over `vars` variables.
pub fn feasible(system: &[LinearConstraint], vars: usize) -> bool {
    let rows: Vec<Row> = system.iter().flat_map(|c| rows_of(c, vars)).collect();
    let any_strict = rows.iter().any(|r| r.strict);
    // Variables are x_0..x_{vars-1} and t; every row becomes dense over vars + 1.
    let dim = vars + 1;
    let mut dense: Vec<(Vec<BigRational>, BigRational)> = rows
        .iter()
        .map(|r| {
            let mut cs = r.coeffs.clone();
            cs.push(if r.strict { BigRational::one() } else { BigRational::zero() });
            (cs, r.bound.clone())
        })
        .collect();
    for i in 0..dim {
        let unit = |s: i64| (0..dim).map(|j| if j == i { rat(s) } else { BigRational::zero() }).collect::<Vec<_>>();
        if i < vars {
            dense.push((unit(1), rat(BOX)));
            dense.push((unit(-1), rat(BOX)));
        } else {
            dense.push((unit(1), rat(1)));
            dense.push((unit(-1), rat(0)));
        }
    }
    for pick in combinations(dense.len(), dim) {
        let m = pick.iter().map(|&i| dense[i].0.clone()).collect();
        let rhs = pick.iter().map(|&i| dense[i].1.clone()).collect();
        let Some(x) = solve(m, rhs) else { continue };
        let inside = dense.iter().all(|(cs, b)| {
            let lhs: BigRational = cs.iter().zip(&x).map(|(c, v)| c * v).sum();
            lhs <= *b
        });
        if inside && (!any_strict || x[vars].is_positive()) {
            return true;
        }
    }
    false
}

fn negations(g: &LinearConstraint) -> Vec<LinearConstraint> {
    let flip = |relation| LinearConstraint { relation, ..g.clone() };
    match g.relation {
        Relation::Lt => vec![flip(Relation::Ge)],
        Relation::Le => vec![flip(Relation::Gt)],
        Relation::Ge => vec![flip(Relation::Lt)],
        Relation::Gt => vec![flip(Relation::Le)],
        Relation::Eq => vec![flip(Relation::Lt), flip(Relation::Gt)],
    }
}

pub fn entails(assumptions: &[LinearConstraint], goal: &LinearConstraint, vars: usize) -> bool {
    negations(goal).into_iter().all(|neg| {
        let mut system = assumptions.to_vec();
        system.push(neg);
        !feasible(&system, vars)
    })
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub vars: usize,
    pub assumptions: Vec<LinearConstraint>,
    pub goal: LinearConstraint,
}

const RELATIONS: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];

fn random_constraint(rng: &mut ChaCha8Rng, vars: usize) -> LinearConstraint {
    let coeffs: Vec<i64> = (0..vars).map(|_| rng.gen_range(-3..=3)).collect();
    let relation = RELATIONS[rng.gen_range(0..RELATIONS.len())];
    constraint(&coeffs, rng.gen_range(-5..=5), relation)
}

/// A goal implied by construction: a nonnegative combination of two
/// inequality assumptions, loosened by a nonnegative constant.
fn implied_goal(rng: &mut ChaCha8Rng, vars: usize, assumptions: &[LinearConstraint]) -> Option<LinearConstraint> {
    let ineqs: Vec<&LinearConstraint> = assumptions.iter().filter(|c| c.relation != Relation::Eq).collect();
    if ineqs.len() < 2 {
        return None;
    }
    // Orient everything as `form >= 0` / `form > 0`.
    let orient = |c: &LinearConstraint| -> (Vec<BigRational>, BigRational, bool) {
        let sign = if matches!(c.relation, Relation::Le | Relation::Lt) { -BigRational::one() } else { BigRational::one() };
        let cs = (0..vars).map(|i| c.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero) * &sign).collect();
        (cs, &c.constant * &sign, matches!(c.relation, Relation::Lt | Relation::Gt))
    };
    let (a, b) = (orient(ineqs[0]), orient(ineqs[1]));
    let (la, lb) = (rat(rng.gen_range(0..=2)), rat(rng.gen_range(1..=2)));
    let slack = rat(rng.gen_range(0..=2));
    let coeffs: Vec<BigRational> = a.0.iter().zip(&b.0).map(|(x, y)| x * &la + y * &lb).collect();
    let constant = &a.1 * &la + &b.1 * &lb + slack;
    let strict = (b.2 && lb.is_positive()) || (a.2 && la.is_positive());
    let relation = if strict { Relation::Gt } else { Relation::Ge };
    Some(LinearConstraint::new(corec::proof::linear::LinearExpr { constant, coeffs }, relation))
}

/// A fixed, seeded corpus of `count` instances over at most 3 variables.
pub fn corpus(count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x00e1_1a17);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let vars = rng.gen_range(1..=3);
        let assumptions: Vec<LinearConstraint> = (0..rng.gen_range(1..=4)).map(|_| random_constraint(&mut rng, vars)).collect();
        let goal = if rng.gen_bool(0.5) {
            match implied_goal(&mut rng, vars, &assumptions) {
                Some(g) => g,
                None => continue,
            }
        } else {
            random_constraint(&mut rng, vars)
        };
        out.push(Instance { vars, assumptions, goal });
    }
    out
}
