use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bijection between surface symbols (tags, tokens) and dense indices.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Self { symbols, index })
    }

    /// Symbols `prefix0, prefix1, ...`; used for generated models.
    pub fn numbered(prefix: &str, size: usize) -> Self {
        Self::new((0..size).map(|i| format!("{prefix}{i}"))).expect("numbered symbols are distinct")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, index: usize) -> Option<&str> {
        self.symbols.get(index).map(String::as_str)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    /// Appends `symbol` if absent and returns its index.
    pub fn intern(&mut self, symbol: &str) -> usize {
        if let Some(i) = self.index_of(symbol) {
            return i;
        }
        let i = self.symbols.len();
        self.symbols.push(symbol.to_owned());
        self.index.insert(symbol.to_owned(), i);
        i
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(symbols: Vec<String>) -> Result<Self> {
        Self::new(symbols)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trips() {
        let a = Alphabet::new(["DET", "NOUN", "VERB"]).unwrap();
        for i in 0..a.len() {
            assert_eq!(a.index_of(a.symbol(i).unwrap()), Some(i));
        }
        assert_eq!(a.index_of("ADJ"), None);
        assert_eq!(a.symbol(3), None);
    }

    #[test]
    fn duplicates_rejected() {
        assert!(matches!(
            Alphabet::new(["a", "b", "a"]),
            Err(Error::InvalidAlphabet(_))
        ));
    }

    #[test]
    fn intern_appends_once() {
        let mut a = Alphabet::new(["x"]).unwrap();
        assert_eq!(a.intern("y"), 1);
        assert_eq!(a.intern("x"), 0);
        assert_eq!(a.intern("y"), 1);
        assert_eq!(a.len(), 2);
    }

    #[test]
    fn serde_is_a_plain_array() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"["a","b"]"#);
        let back: Alphabet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<Alphabet>(r#"["a","a"]"#).is_err());
    }
}
