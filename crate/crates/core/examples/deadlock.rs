//! Finds a deadlock and prints the shortest event path into it.

use ceremony_checker::kernel::{parse_model, Model};
use ceremony_checker::statespace::{check_deadlock, explore, DeadlockReport};

// Both senders want the single receiver; whichever loses is stuck.
const SRC: &str = "
channel c 0;
A() = c!S -> Skip;
B() = c!I -> Skip;
R() = c?x -> Skip;
Model() = A() ||| B() ||| R();
";

fn main() {
    let mut def = parse_model(SRC).expect("parse");
    def.entry = "Model".into();
    let model = Model::compile(def).expect("compile");
    let mut ts = explore(&model, 1_000).expect("explore");
    match check_deadlock(&mut ts).expect("search") {
        DeadlockReport::DeadlockFree => println!("deadlock-free"),
        DeadlockReport::Deadlocked { witness, state } => {
            let path: Vec<String> = witness.iter().map(|e| e.to_string()).collect();
            println!("deadlock after <{}>", path.join(", "));
            println!("stuck at {}", model.render_term(&ts.config(state).term));
        }
    }
}
