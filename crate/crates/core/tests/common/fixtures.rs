//! Small hand-written models exercising one language feature each.

use ceremony_checker::kernel::{parse_model, ModelDef, Sym, Value};

pub const HANDSHAKE: &str = "
channel c 0;
var x = S; var y = S; var f = false;
Snd() = c!I.Pk{x=I} -> Snd2();
Snd2() = c!S.Pk -> Skip;
Rcv() = c?u.Pk{y=u; f=x==I} -> Rcv();
Model() = Snd() ||| Rcv();
";

pub const CHOICE: &str = "
channel c 0;
var got = S;
P() = []v:{S, I}@ (c!v -> P() [] tau -> Stop);
Q() = c?S{got=S} -> Q() [] c?I{got=I} -> Skip;
Model() = P() ||| Q();
";

pub const SEQUENCE: &str = "
Model() = (a -> Skip ||| b -> Skip); c -> (d -> Skip; Skip); Stop;
";

pub const GUARDS: &str = "
var n = HelloClient; var w = false;
Model() = step{n=HelloServer} -> Body();
Body() = (if (n==HelloServer) { ok -> Skip }; Tail());
Tail() = case { w: x -> Stop n==Data: y -> Stop default: z{w=true} -> More() };
More() = ifa (w && n==Data) { done -> Stop } else if (w) { again{n=Data} -> Tail() };
";

pub const STORES: &str = "
var<Set> store;
var cert[3];
var seen = false;
Model() = []u:{S, I}@ pick{cert[0]=u; cert[1]=Pk} ->
    (if (store.Contains(cert)) { known{seen=true} -> Model() } else { keep{store.Add(cert)} -> Model() });
";

pub const DEADLOCK: &str = "
channel c 0;
A() = c!S -> Skip;
B() = c!I -> Skip;
Model() = A() ||| B() ||| (tick -> Stop);
";

pub const NESTED: &str = "
channel c 0; channel d 0;
var v = S;
Srv() = c?m -> d!m -> Srv();
Cli() = (c!S -> Skip ||| c!I -> Skip); d?r{v=r} -> Skip;
Model() = Srv() ||| Cli();
";

pub const SHADOW: &str = "
channel c 0;
var last = S;
P(x) = c!x -> c?x{last=x} -> P(x);
Q() = c?y -> ([]z:{HSTS, No_HSTS}@ c!I{if (y==S) {last=I} else {last=S}} -> Q());
Model() = P(S) ||| Q();
";

/// (name, source) of every fixture.
pub const ALL: [(&str, &str); 8] = [
    ("handshake", HANDSHAKE),
    ("choice", CHOICE),
    ("sequence", SEQUENCE),
    ("guards", GUARDS),
    ("stores", STORES),
    ("deadlock", DEADLOCK),
    ("nested", NESTED),
    ("shadow", SHADOW),
];

pub fn definition(src: &str) -> ModelDef {
    let mut def = parse_model(src).expect("fixture parses");
    def.entry = "Model".into();
    if let Some(s) = def.set_mut("store") {
        s.universe = [Sym::S, Sym::I]
            .into_iter()
            .map(|u| Value::tuple([u, Sym::Pk, Sym::HelloClient]))
            .collect();
    }
    def
}
