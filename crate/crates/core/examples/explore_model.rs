//! Parses a small CSP# model, enumerates its transition system and prints it.

use ceremony_checker::kernel::{parse_model, Model};
use ceremony_checker::statespace::explore;

const SRC: &str = "
channel net 0;
var got = HelloClient;
var done = false;
#define finished done;

Client() = net!HelloClient -> net?m{got=m} -> fin{done=true} -> Skip;
Server() = net?HelloClient -> ([]r:{HelloServer, Data}@ net!r -> Server());
Model() = Client() ||| Server();
";

fn main() {
    let mut def = parse_model(SRC).expect("parse");
    def.entry = "Model".into();
    let model = Model::compile(def).expect("compile");
    let ts = explore(&model, 1_000).expect("explore");
    print!("{}", ts.dump());
    println!("{} transitions", ts.transition_count());
}
