//! Line-oriented text forms for sequences, elements, character sequences and
//! group descriptors. Every `Display` output parses back to an equal value.
//!
//! ```text
//! model=torus bases=arith(2,1) prefix=[1,2] tail=zero
//! model=padic p=2 nk=squares prefix=[1] tail=zero
//! model=product bases=geom(2,2) prefix=[0,1] tail=scaledfloor(1/250)
//! Z:1 + Z(2):omega + Zp(3,inf):1 + Zfam(geom(2,2)):1
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{parse_rational, Rational};
use crate::decision::{Factor, FactorKind, GroupDescriptor, Multiplicity};
use crate::error::{Error, ParseError, Result};
use crate::models::{BaseSequence, CharSequence, Character, Element, IndexRule, Model, TailRule};

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(self.pos, msg))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected `{c}`, found `{found}`")),
                None => self.err(format!("expected `{c}`, found end of input")),
            }
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let len = rest.find(|c: char| !f(c)).unwrap_or(rest.len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn ident(&mut self) -> PResult<&'a str> {
        let id = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if id.is_empty() {
            return self.err("expected a name");
        }
        Ok(id)
    }

    fn biguint(&mut self) -> PResult<BigUint> {
        let start = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        if digits.is_empty() {
            return self.err("expected a non-negative integer");
        }
        digits.parse().map_err(|_| ParseError::new(start, "invalid integer"))
    }

    fn u64(&mut self) -> PResult<u64> {
        self.skip_ws();
        let start = self.pos;
        let v = self.biguint()?;
        u64::try_from(&v).map_err(|_| ParseError::new(start, format!("{v} does not fit in 64 bits")))
    }

    fn usize(&mut self) -> PResult<usize> {
        self.skip_ws();
        let start = self.pos;
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| ParseError::new(start, "value too large"))
    }

    fn rational(&mut self) -> PResult<Rational> {
        self.skip_ws();
        let start = self.pos;
        let s = self.take_while(|c| c.is_ascii_digit() || c == '/' || c == '-');
        parse_rational(s).map_err(|e| ParseError::new(start + e.column, e.message))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn pair_u64(&mut self) -> PResult<(u64, u64)> {
        self.expect('(')?;
        let a = self.u64()?;
        self.expect(',')?;
        let b = self.u64()?;
        self.expect(')')?;
        Ok((a, b))
    }

    fn finish(&mut self) -> PResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

fn base_sequence(c: &mut Cursor) -> PResult<BaseSequence> {
    c.skip_ws();
    let at = c.pos;
    match c.ident()? {
        "arith" => {
            let (start, step) = c.pair_u64()?;
            Ok(BaseSequence::Arithmetic { start, step })
        }
        "geom" => {
            let (start, ratio) = c.pair_u64()?;
            Ok(BaseSequence::Geometric { start, ratio })
        }
        "factorial" => {
            c.expect('(')?;
            let inner = base_sequence(c)?;
            c.expect(')')?;
            Ok(BaseSequence::FactorialProduct(Box::new(inner)))
        }
        "explicit" => {
            c.expect('(')?;
            let terms = c.list(|c| c.u64())?;
            c.expect(',')?;
            let tail = base_sequence(c)?;
            c.expect(')')?;
            Ok(BaseSequence::Explicit { terms, tail: Box::new(tail) })
        }
        other => Err(ParseError::new(at, format!("unknown base sequence `{other}`"))),
    }
}

fn index_rule(c: &mut Cursor) -> PResult<IndexRule> {
    c.skip_ws();
    let at = c.pos;
    match c.ident()? {
        "squares" => Ok(IndexRule::Squares),
        "triangular" => Ok(IndexRule::Triangular),
        "arith" => {
            let (start, step) = c.pair_u64()?;
            Ok(IndexRule::Arithmetic { start, step })
        }
        "geom" => {
            let (start, ratio) = c.pair_u64()?;
            Ok(IndexRule::Geometric { start, ratio })
        }
        "explicit" => {
            c.expect('(')?;
            let terms = c.list(|c| c.u64())?;
            c.expect(',')?;
            let tail = index_rule(c)?;
            c.expect(')')?;
            Ok(IndexRule::Explicit { terms, tail: Box::new(tail) })
        }
        other => Err(ParseError::new(at, format!("unknown index rule `{other}`"))),
    }
}

/// Tail text; `spacedones` takes its index rule from the surrounding line.
enum TailText {
    Rule(TailRule),
    SpacedOnes { l: usize, s: usize },
}

fn tail(c: &mut Cursor) -> PResult<TailText> {
    c.skip_ws();
    let at = c.pos;
    let rule = match c.ident()? {
        "zero" => TailRule::Zero,
        "const" => {
            c.expect('(')?;
            let d = c.biguint()?;
            c.expect(')')?;
            TailRule::ConstantDigit(d)
        }
        "periodic" => {
            c.expect('(')?;
            let pattern = c.list(|c| c.biguint())?;
            c.expect(')')?;
            TailRule::Periodic(pattern)
        }
        "scaledfloor" => {
            c.expect('(')?;
            let t = c.rational()?;
            c.expect(')')?;
            TailRule::ScaledFloor(t)
        }
        "spacedones" => {
            c.expect('(')?;
            let l = c.usize()?;
            c.expect(',')?;
            let s = c.usize()?;
            c.expect(')')?;
            return Ok(TailText::SpacedOnes { l, s });
        }
        other => return Err(ParseError::new(at, format!("unknown tail rule `{other}`"))),
    };
    Ok(TailText::Rule(rule))
}

#[derive(Default)]
struct Fields {
    model: Option<(usize, String)>,
    bases: Option<BaseSequence>,
    p: Option<u64>,
    nk: Option<IndexRule>,
    prefix: Option<Vec<BigUint>>,
    tail: Option<(usize, TailText)>,
}

fn fields(src: &str) -> PResult<Fields> {
    let mut c = Cursor::new(src);
    let mut f = Fields::default();
    while !c.at_end() {
        c.skip_ws();
    let at = c.pos;
        let key = c.ident()?;
        c.expect('=')?;
        let dup = match key {
            "model" => {
                c.skip_ws();
                let v = c.pos;
                f.model.replace((v, c.ident()?.to_string())).is_some()
            }
            "bases" => f.bases.replace(base_sequence(&mut c)?).is_some(),
            "p" => f.p.replace(c.u64()?).is_some(),
            "nk" => f.nk.replace(index_rule(&mut c)?).is_some(),
            "prefix" => f.prefix.replace(c.list(|c| c.biguint())?).is_some(),
            "tail" => {
                c.skip_ws();
                let v = c.pos;
                f.tail.replace((v, tail(&mut c)?)).is_some()
            }
            other => return Err(ParseError::new(at, format!("unknown field `{other}`"))),
        };
        if dup {
            return Err(ParseError::new(at, format!("field `{key}` given twice")));
        }
    }
    c.finish()?;
    Ok(f)
}

fn model_of(f: &Fields) -> PResult<Model> {
    let (at, name) = f.model.as_ref().ok_or_else(|| ParseError::new(0, "missing field `model`"))?;
    let missing = |k: &str| ParseError::new(*at, format!("model `{name}` needs field `{k}`"));
    match name.as_str() {
        "torus" => Ok(Model::Torus { bases: f.bases.clone().ok_or_else(|| missing("bases"))? }),
        "padic" => Ok(Model::PAdic { p: f.p.ok_or_else(|| missing("p"))? }),
        "product" => Ok(Model::Product { bases: f.bases.clone().ok_or_else(|| missing("bases"))? }),
        other => Err(ParseError::new(*at, format!("unknown model `{other}`"))),
    }
}

/// Parses an element line; `nk` is needed only for `spacedones` tails.
pub fn parse_element(src: &str) -> Result<Element> {
    let mut f = fields(src)?;
    let model = model_of(&f)?;
    let tail = match f.tail.take() {
        None => TailRule::Zero,
        Some((_, TailText::Rule(r))) => r,
        Some((at, TailText::SpacedOnes { l, s })) => {
            let index = f.nk.clone().ok_or_else(|| ParseError::new(at, "spacedones needs field `nk`"))?;
            TailRule::SpacedOnes { l, s, index }
        }
    };
    Element::new(model, f.prefix.take().unwrap_or_default(), tail)
}

/// Parses a character sequence line; `prefix` and `tail` fields are ignored.
pub fn parse_char_sequence(src: &str) -> Result<CharSequence> {
    let f = fields(src)?;
    let u = match model_of(&f)? {
        Model::Torus { bases } => CharSequence::Torus { bases },
        Model::Product { bases } => CharSequence::Product { bases },
        Model::PAdic { p } => {
            let at = f.model.as_ref().map_or(0, |m| m.0);
            let index = f.nk.ok_or_else(|| ParseError::new(at, "model `padic` needs field `nk`"))?;
            CharSequence::PAdic { p, index }
        }
    };
    u.validate()?;
    Ok(u)
}

/// Parses a single character of `model`: an integer on the circle, `m/p^t`
/// for p-adic integers, a coefficient list for products.
pub fn parse_character(model: &Model, src: &str) -> Result<Character> {
    let mut c = Cursor::new(src);
    let chi = match model {
        Model::Torus { .. } => {
            let q = c.rational()?;
            if !q.is_integer() {
                return Err(ParseError::new(0, "circle characters are integers").into());
            }
            Character::Torus(q.to_integer())
        }
        Model::PAdic { p } => {
            let q = c.rational()?;
            let (exp, rem) = prime_power_exponent(q.denom(), *p);
            if !rem.is_one() {
                return Err(ParseError::new(0, format!("denominator must be a power of {p}")).into());
            }
            let modulus = BigInt::from(*p).pow(exp as u32);
            let m = ((q.numer() % &modulus) + &modulus) % &modulus;
            Character::padic(*p, m.magnitude().clone(), exp)
        }
        Model::Product { .. } => Character::product(c.list(|c| c.biguint())?),
    };
    c.finish()?;
    Ok(chi)
}

fn prime_power_exponent(d: &BigInt, p: u64) -> (usize, BigInt) {
    let p = BigInt::from(p);
    let mut d = d.clone();
    let mut e = 0;
    while !d.is_zero() && (&d % &p).is_zero() {
        d /= &p;
        e += 1;
    }
    (e, d)
}

/// Parses a digit list such as `[1,1,0]`.
pub fn parse_digits(src: &str) -> Result<Vec<BigUint>> {
    let mut c = Cursor::new(src);
    let v = c.list(|c| c.biguint())?;
    c.finish()?;
    Ok(v)
}

fn factor(c: &mut Cursor) -> PResult<Factor> {
    c.skip_ws();
    let at = c.pos;
    let kind = match c.ident()? {
        "Z" => {
            if c.eat('(') {
                let n = c.u64()?;
                c.expect(')')?;
                FactorKind::Cyclic(n)
            } else {
                FactorKind::InfiniteCyclic
            }
        }
        "Zp" => {
            c.expect('(')?;
            let p = c.u64()?;
            c.expect(',')?;
            c.skip_ws();
            let inf_at = c.pos;
            if c.ident()? != "inf" {
                return Err(ParseError::new(inf_at, "expected `inf`"));
            }
            c.expect(')')?;
            FactorKind::Prufer(p)
        }
        "Zfam" => {
            c.expect('(')?;
            let b = base_sequence(c)?;
            c.expect(')')?;
            FactorKind::CyclicFamily(b)
        }
        other => return Err(ParseError::new(at, format!("unknown factor `{other}`"))),
    };
    c.expect(':')?;
    let mult = if c.peek().is_some_and(|ch| ch.is_ascii_digit()) {
        Multiplicity::Finite(c.u64()?)
    } else {
        c.skip_ws();
        let m_at = c.pos;
        match c.ident()? {
            "omega" => Multiplicity::Omega,
            other => return Err(ParseError::new(m_at, format!("expected a multiplicity, found `{other}`"))),
        }
    };
    Ok(Factor::new(kind, mult))
}

/// Parses `kind:mult (+ kind:mult)*`; an empty string is the trivial group.
pub fn parse_descriptor(src: &str) -> Result<GroupDescriptor> {
    let mut c = Cursor::new(src);
    let mut factors = Vec::new();
    if !c.at_end() {
        factors.push(factor(&mut c)?);
        while c.eat('+') {
            factors.push(factor(&mut c)?);
        }
    }
    c.finish()?;
    GroupDescriptor::new(factors)
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for BaseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseSequence::Arithmetic { start, step } => write!(f, "arith({start},{step})"),
            BaseSequence::Geometric { start, ratio } => write!(f, "geom({start},{ratio})"),
            BaseSequence::FactorialProduct(inner) => write!(f, "factorial({inner})"),
            BaseSequence::Explicit { terms, tail } => write!(f, "explicit([{}],{tail})", join(terms)),
        }
    }
}

impl fmt::Display for IndexRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexRule::Squares => f.write_str("squares"),
            IndexRule::Triangular => f.write_str("triangular"),
            IndexRule::Arithmetic { start, step } => write!(f, "arith({start},{step})"),
            IndexRule::Geometric { start, ratio } => write!(f, "geom({start},{ratio})"),
            IndexRule::Explicit { terms, tail } => write!(f, "explicit([{}],{tail})", join(terms)),
        }
    }
}

/// The index rule of a `spacedones` tail is not part of this form.
impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Zero => f.write_str("zero"),
            TailRule::ConstantDigit(c) => write!(f, "const({c})"),
            TailRule::Periodic(p) => write!(f, "periodic([{}])", join(p)),
            TailRule::ScaledFloor(t) => write!(f, "scaledfloor({}/{})", t.numer(), t.denom()),
            TailRule::SpacedOnes { l, s, .. } => write!(f, "spacedones({l},{s})"),
        }
    }
}

fn model_fields(m: &Model, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match m {
        Model::Torus { bases } => write!(f, "model=torus bases={bases}"),
        Model::PAdic { p } => write!(f, "model=padic p={p}"),
        Model::Product { bases } => write!(f, "model=product bases={bases}"),
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        model_fields(self.model(), f)?;
        if let TailRule::SpacedOnes { index, .. } = self.tail() {
            write!(f, " nk={index}")?;
        }
        write!(f, " prefix=[{}] tail={}", join(self.prefix()), self.tail())
    }
}

impl fmt::Display for CharSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharSequence::PAdic { p, index } => write!(f, "model=padic p={p} nk={index}"),
            other => model_fields(&other.model(), f),
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Character::Torus(k) => write!(f, "{k}"),
            Character::PAdic { p, numer, exp } => write!(f, "{numer}/{}", BigUint::from(*p).pow(*exp as u32)),
            Character::Product(c) => write!(f, "[{}]", join(c)),
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Omega => f.write_str("omega"),
        }
    }
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorKind::InfiniteCyclic => f.write_str("Z"),
            FactorKind::Cyclic(n) => write!(f, "Z({n})"),
            FactorKind::Prufer(p) => write!(f, "Zp({p},inf)"),
            FactorKind::CyclicFamily(b) => write!(f, "Zfam({b})"),
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors().iter().map(|x| format!("{}:{}", x.kind, x.mult)).collect();
        f.write_str(&parts.join(" + "))
    }
}

macro_rules! from_str_via {
    ($t:ty, $f:expr) => {
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                $f(s)
            }
        }
    };
}

from_str_via!(Element, parse_element);
from_str_via!(CharSequence, parse_char_sequence);
from_str_via!(GroupDescriptor, parse_descriptor);
from_str_via!(BaseSequence, |s: &str| -> Result<BaseSequence> {
    let mut c = Cursor::new(s);
    let b = base_sequence(&mut c)?;
    c.finish()?;
    Ok(b)
});
from_str_via!(IndexRule, |s: &str| -> Result<IndexRule> {
    let mut c = Cursor::new(s);
    let r = index_rule(&mut c)?;
    c.finish()?;
    Ok(r)
});
