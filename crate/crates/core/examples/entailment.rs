//! Linear entailment over the rationals, as used by proof obligations.

use corec::proof::linear::entails_linear;
use corec::syntax::parse_window_constraints;

fn main() {
    let cases = [
        ("w0 > 0 and w1 > 0 and w2 = w0 + w1", "w2 > 0"),
        ("w0 >= 0 and w1 >= w0", "w1 >= 0"),
        ("w0 > 0", "w0 >= 1"),
        ("2*w0 <= 3 and w0 >= 1", "w0 <= 3/2"),
    ];
    for (assumptions, goal) in cases {
        let a = parse_window_constraints(assumptions).unwrap();
        let g = parse_window_constraints(goal).unwrap().remove(0);
        let sym = if entails_linear(&a, &g) { "|=" } else { "|/=" };
        println!("{assumptions} {sym} {goal}");
    }
}
