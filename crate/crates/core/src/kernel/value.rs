//! The closed value alphabet of ceremony models.

use std::fmt;

macro_rules! symbols {
    ($($variant:ident => $name:literal),* $(,)?) => {
        /// A symbolic constant. The set is closed: every message field, user
        /// choice, certificate field and status flag of a ceremony is one of these.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Sym {
            $($variant),*
        }

        impl Sym {
            /// All constants in declaration order.
            pub const ALL: &'static [Sym] = &[$(Sym::$variant),*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Sym::$variant => $name),*
                }
            }

            pub fn from_name(name: &str) -> Option<Sym> {
                match name {
                    $($name => Some(Sym::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

symbols! {
    HelloClient => "HelloClient",
    HelloServer => "HelloServer",
    ClientFinished => "ClientFinished",
    ServerFinished => "ServerFinished",
    Data => "Data",
    Warning => "Warning",
    Webpage => "Webpage",
    Continue => "Continue",
    Abort => "Abort",
    StoreCertificate => "StoreCertificate",
    Pk => "Pk",
    Hsts => "HSTS",
    NoHsts => "No_HSTS",
    S => "S",
    I => "I",
    SignCa => "SignCA",
    SignS => "SignS",
    SignI => "SignI",
    Expi => "expi",
    Noexpi => "noexpi",
    Revo => "revo",
    Norevo => "norevo",
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single storable cell value: what variables, array cells, binders and
/// channel fields hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Sym(Sym),
    Bool(bool),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Sym(s) => s.fmt(f),
            Scalar::Bool(b) => b.fmt(f),
        }
    }
}

impl From<Sym> for Scalar {
    fn from(s: Sym) -> Self {
        Scalar::Sym(s)
    }
}

impl From<bool> for Scalar {
    fn from(b: bool) -> Self {
        Scalar::Bool(b)
    }
}

/// The result of evaluating an expression. Tuples arise from reading a whole
/// array (e.g. a certificate) and are what certificate stores hold.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Sym(Sym),
    Bool(bool),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        match self {
            Value::Sym(s) => Some(Scalar::Sym(*s)),
            Value::Bool(b) => Some(Scalar::Bool(*b)),
            Value::Tuple(_) => None,
        }
    }

    pub fn tuple<I: IntoIterator<Item = Sym>>(items: I) -> Value {
        Value::Tuple(items.into_iter().map(Value::Sym).collect())
    }
}

impl From<Scalar> for Value {
    fn from(s: Scalar) -> Self {
        match s {
            Scalar::Sym(s) => Value::Sym(s),
            Scalar::Bool(b) => Value::Bool(b),
        }
    }
}

impl From<Sym> for Value {
    fn from(s: Sym) -> Self {
        Value::Sym(s)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Sym(s) => s.fmt(f),
            Value::Bool(b) => b.fmt(f),
            Value::Tuple(items) => {
                f.write_str("(")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    v.fmt(f)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Sym::ALL {
            assert_eq!(Sym::from_name(s.name()), Some(*s));
        }
        assert_eq!(Sym::ALL.len(), 22);
        assert_eq!(Sym::from_name("HSTS"), Some(Sym::Hsts));
        assert_eq!(Sym::from_name("Hsts"), None);
    }

    #[test]
    fn tuple_equality_is_structural() {
        let a = Value::tuple([Sym::S, Sym::Pk, Sym::SignI]);
        let b = Value::tuple([Sym::S, Sym::Pk, Sym::SignI]);
        let c = Value::tuple([Sym::S, Sym::Pk, Sym::SignCa]);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.to_string(), "(S,Pk,SignI)");
    }
}
