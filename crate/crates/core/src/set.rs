//! Ground types: exact integer sets, exact rational sets, the additive /
//! multiplicative mode switch, and the line-oriented set file format.
//!
//! The file format is one token per line, `'\n'` separated. Lines whose first
//! non-blank character is `#` are comments and blank lines are ignored.
//! Integer files hold one decimal integer per line; rational files hold
//! either `p` or `p/q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Element = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Additive,
    Multiplicative,
}

impl Mode {
    pub fn identity(self) -> Element {
        match self {
            Mode::Additive => BigInt::zero(),
            Mode::Multiplicative => BigInt::one(),
        }
    }

    #[inline]
    pub fn combine(self, a: &Element, b: &Element) -> Element {
        match self {
            Mode::Additive => a + b,
            Mode::Multiplicative => a * b,
        }
    }

    /// Folds a slice of elements with the mode's operation.
    pub fn fold<'a>(self, items: impl IntoIterator<Item = &'a Element>) -> Element {
        items
            .into_iter()
            .fold(self.identity(), |acc, x| self.combine(&acc, x))
    }

    /// Multiplicative operations are undefined on sets containing zero.
    pub fn check(self, set: &GroundSet) -> Result<()> {
        if self == Mode::Multiplicative && set.contains(&BigInt::zero()) {
            return Err(Error::Domain(
                "multiplicative mode requires a zero-free set".into(),
            ));
        }
        Ok(())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Additive => "add",
            Mode::Multiplicative => "mul",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "add" | "additive" | "+" => Ok(Mode::Additive),
            "mul" | "multiplicative" | "*" | "x" => Ok(Mode::Multiplicative),
            other => Err(Error::Parameter(format!("unknown mode '{other}'"))),
        }
    }
}

/// A finite set of integers, stored strictly increasing.
#[derive(Debug, Clone, Default)]
pub struct GroundSet {
    elements: Vec<Element>,
    label: Option<String>,
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

impl Eq for GroundSet {}

impl GroundSet {
    pub fn new<I, T>(items: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<Element>,
    {
        Self::with_duplicates(items).0
    }

    /// Builds a set and reports how many duplicate items were dropped.
    pub fn with_duplicates<I, T>(items: I) -> (Self, usize)
    where
        I: IntoIterator<Item = T>,
        T: Into<Element>,
    {
        let mut elements: Vec<Element> = items.into_iter().map(Into::into).collect();
        let raw = elements.len();
        elements.sort_unstable();
        elements.dedup();
        let dropped = raw - elements.len();
        (
            GroundSet {
                elements,
                label: None,
            },
            dropped,
        )
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn max(&self) -> Option<&Element> {
        self.elements.last()
    }

    pub fn is_subset_of(&self, other: &GroundSet) -> bool {
        self.elements.iter().all(|x| other.contains(x))
    }

    /// The set with every element of `removed` taken out.
    pub fn without(&self, removed: &GroundSet) -> GroundSet {
        GroundSet {
            elements: self
                .elements
                .iter()
                .filter(|x| !removed.contains(x))
                .cloned()
                .collect(),
            label: self.label.clone(),
        }
    }

    /// Elements at the given positions, in increasing order.
    pub fn select(&self, mask: impl Fn(usize) -> bool) -> GroundSet {
        GroundSet {
            elements: self
                .elements
                .iter()
                .enumerate()
                .filter(|(i, _)| mask(*i))
                .map(|(_, x)| x.clone())
                .collect(),
            label: None,
        }
    }

    pub fn into_vec(self) -> Vec<Element> {
        self.elements
    }

    /// One decimal integer per line, trailing newline included.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        if let Some(label) = &self.label {
            out.push_str("# ");
            out.push_str(&label.replace('\n', " "));
            out.push('\n');
        }
        for x in &self.elements {
            out.push_str(&x.to_string());
            out.push('\n');
        }
        out
    }
}

impl<'a> IntoIterator for &'a GroundSet {
    type Item = &'a Element;
    type IntoIter = std::slice::Iter<'a, Element>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// A finite set of rationals in lowest terms, stored strictly increasing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalSet {
    elements: Vec<Rational>,
}

impl RationalSet {
    pub fn new<I: IntoIterator<Item = Rational>>(items: I) -> Self {
        Self::with_duplicates(items).0
    }

    pub fn with_duplicates<I: IntoIterator<Item = Rational>>(items: I) -> (Self, usize) {
        let mut elements: Vec<Rational> = items.into_iter().collect();
        let raw = elements.len();
        elements.sort_unstable();
        elements.dedup();
        let dropped = raw - elements.len();
        (RationalSet { elements }, dropped)
    }

    pub fn from_integers<I, T>(items: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(items.into_iter().map(|x| Rational::from_integer(x.into())))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Rational] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Applies `f` elementwise; the result is re-sorted and deduplicated.
    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> RationalSet {
        RationalSet::new(self.elements.iter().map(f))
    }

    pub fn union(&self, other: &RationalSet) -> RationalSet {
        RationalSet::new(self.elements.iter().chain(other.iter()).cloned())
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for x in &self.elements {
            out.push_str(&format_rational(x));
            out.push('\n');
        }
        out
    }
}

/// Result of parsing a set file: the set and the number of duplicate lines dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub set: T,
    pub duplicates: usize,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n').enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn decode(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        Error::Parse {
            line,
            message: "invalid UTF-8".into(),
        }
    })
}

fn parse_integer(token: &str) -> std::result::Result<BigInt, String> {
    let digits = token.strip_prefix(['+', '-']).unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("malformed integer '{token}'"));
    }
    token
        .parse::<BigInt>()
        .map_err(|_| format!("malformed integer '{token}'"))
}

/// Parses `p` or `p/q` into a rational in lowest terms.
pub fn parse_rational(token: &str) -> std::result::Result<Rational, String> {
    let token = token.trim();
    match token.split_once('/') {
        None => parse_integer(token).map(Rational::from_integer),
        Some((num, den)) => {
            let num = parse_integer(num.trim())?;
            let den = parse_integer(den.trim())?;
            if den.is_zero() {
                return Err(format!("zero denominator in '{token}'"));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// `p` for integers, `p/q` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_set(bytes: &[u8]) -> Result<Parsed<GroundSet>> {
    let text = decode(bytes)?;
    let mut items = Vec::new();
    for (line, token) in data_lines(text) {
        let value = parse_integer(token).map_err(|message| Error::Parse { line, message })?;
        items.push(value);
    }
    let (set, duplicates) = GroundSet::with_duplicates(items);
    Ok(Parsed { set, duplicates })
}

pub fn parse_rational_set(bytes: &[u8]) -> Result<Parsed<RationalSet>> {
    let text = decode(bytes)?;
    let mut items = Vec::new();
    for (line, token) in data_lines(text) {
        let value = parse_rational(token).map_err(|message| Error::Parse { line, message })?;
        items.push(value);
    }
    let (set, duplicates) = RationalSet::with_duplicates(items);
    Ok(Parsed { set, duplicates })
}
