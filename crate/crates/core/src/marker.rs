//! Alphabets, signed markers, marker strings and the tuples/tables they encode.
//!
//! A document is a string over the terminal alphabet Σ, one `char` per
//! terminal. A *Γ-tuple* for a document of length `n` maps every attribute of
//! Γ to a set of positions in `1..=n`. Pairing a document with a tuple is the
//! same thing as writing down one *marker* per position: the terminal at that
//! position (its *sign*) together with the set of attributes whose entry
//! contains the position. [`encode_tuple`] and [`MarkerString::decode`] are the
//! two directions of that bijection.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::parse::Cursor;

/// An attribute symbol (a column name).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attr(Arc<str>);

impl Attr {
    pub fn new(name: &str) -> Self {
        Attr(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Attr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Attr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Attr {
    fn from(s: &str) -> Self {
        Attr::new(s)
    }
}

impl From<String> for Attr {
    fn from(s: String) -> Self {
        Attr(Arc::from(s))
    }
}

impl std::borrow::Borrow<str> for Attr {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A finite set of attributes, kept sorted.
pub type AttrSet = BTreeSet<Attr>;

/// Builds an [`AttrSet`] from names.
pub fn attrs<I, S>(names: I) -> AttrSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(|s| Attr::new(s.as_ref())).collect()
}

/// The terminal alphabet Σ and the attribute alphabet Γ.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Alphabets {
    pub sigma: BTreeSet<char>,
    pub gamma: AttrSet,
}

impl Alphabets {
    pub fn new(sigma: impl IntoIterator<Item = char>, gamma: AttrSet) -> Self {
        Alphabets {
            sigma: sigma.into_iter().collect(),
            gamma,
        }
    }

    /// Convenience constructor: `Alphabets::of("abc", &["x", "y"])`.
    pub fn of(sigma: &str, gamma: &[&str]) -> Self {
        Alphabets::new(sigma.chars(), attrs(gamma.iter()))
    }

    /// Union of both components; the context of a binary operation.
    pub fn union(&self, other: &Alphabets) -> Alphabets {
        Alphabets {
            sigma: self.sigma.union(&other.sigma).copied().collect(),
            gamma: self.gamma.union(&other.gamma).cloned().collect(),
        }
    }

    /// Checks that `marker` belongs to Δ_{Σ,Γ}.
    pub fn check_marker(&self, marker: &Marker) -> Result<()> {
        if !self.sigma.contains(&marker.sign) {
            return Err(Error::contract(format!(
                "marker {marker} has sign '{}' outside Σ",
                marker.sign
            )));
        }
        if let Some(a) = marker.attrs.iter().find(|a| !self.gamma.contains(*a)) {
            return Err(Error::contract(format!(
                "marker {marker} uses attribute '{a}' outside Γ"
            )));
        }
        Ok(())
    }

    /// Every marker of Δ_{Σ,Γ}, in canonical order. Its size is
    /// |Σ|·2^|Γ|, so callers must guard against large Γ.
    pub fn all_markers(&self) -> Vec<Marker> {
        let gamma: Vec<&Attr> = self.gamma.iter().collect();
        let mut out = Vec::with_capacity(self.sigma.len() << gamma.len());
        for &sign in &self.sigma {
            for mask in 0u64..(1u64 << gamma.len()) {
                let attrs = gamma
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, a)| (*a).clone())
                    .collect();
                out.push(Marker { sign, attrs });
            }
        }
        out.sort();
        out
    }

    /// |Δ_{Σ,Γ}|, saturating.
    pub fn marker_alphabet_size(&self) -> usize {
        let pow = if self.gamma.len() >= usize::BITS as usize - 1 {
            usize::MAX
        } else {
            1usize << self.gamma.len()
        };
        pow.saturating_mul(self.sigma.len())
    }
}

/// A Σ-signed Γ-marker `X_b`, written `{x,y}:b`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marker {
    pub sign: char,
    pub attrs: AttrSet,
}

impl Marker {
    pub fn new(sign: char, attrs: AttrSet) -> Self {
        Marker { sign, attrs }
    }

    /// `Marker::of('a', &["x"])` is `{x}:a`.
    pub fn of(sign: char, names: &[&str]) -> Self {
        Marker {
            sign,
            attrs: attrs(names.iter()),
        }
    }

    /// The marker `∅_b`.
    pub fn bare(sign: char) -> Self {
        Marker {
            sign,
            attrs: AttrSet::new(),
        }
    }

    pub fn contains(&self, attr: &str) -> bool {
        self.attrs.contains(attr)
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.attrs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a.as_str())?;
        }
        write!(f, "}}:{}", self.sign)
    }
}

impl fmt::Debug for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Marker {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s, 1);
        cur.skip_ws();
        let m = cur.marker()?;
        cur.skip_ws();
        if !cur.at_end() {
            return Err(cur.error("trailing input after marker"));
        }
        Ok(m)
    }
}

/// A finite sequence of markers.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkerString(pub Vec<Marker>);

impl MarkerString {
    pub fn new(markers: Vec<Marker>) -> Self {
        MarkerString(markers)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn markers(&self) -> &[Marker] {
        &self.0
    }

    /// sign(W): the underlying document.
    pub fn sign(&self) -> String {
        self.0.iter().map(|m| m.sign).collect()
    }

    pub fn concat(&self, other: &MarkerString) -> MarkerString {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        MarkerString(v)
    }

    /// Decodes into `(sign(W), ⟦W⟧)`, where ⟦W⟧(x) = {i | x ∈ W[i]} for every
    /// x ∈ Γ.
    pub fn decode(&self, gamma: &AttrSet) -> Result<(String, GammaTuple)> {
        let mut entries: BTreeMap<Attr, BTreeSet<usize>> =
            gamma.iter().map(|a| (a.clone(), BTreeSet::new())).collect();
        for (i, m) in self.0.iter().enumerate() {
            for a in &m.attrs {
                match entries.get_mut(a) {
                    Some(set) => {
                        set.insert(i + 1);
                    }
                    None => {
                        return Err(Error::contract(format!(
                            "marker {m} at position {} uses attribute '{a}' outside Γ",
                            i + 1
                        )))
                    }
                }
            }
        }
        Ok((
            self.sign(),
            GammaTuple {
                len: self.0.len(),
                entries,
            },
        ))
    }
}

impl From<Vec<Marker>> for MarkerString {
    fn from(v: Vec<Marker>) -> Self {
        MarkerString(v)
    }
}

impl fmt::Display for MarkerString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MarkerString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for MarkerString {
    type Err = Error;

    /// Whitespace-separated markers; the empty string (or `<eps>`) is ε.
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s, 1);
        let mut out = Vec::new();
        cur.skip_ws();
        if cur.eat_str("<eps>") {
            cur.skip_ws();
            if !cur.at_end() {
                return Err(cur.error("trailing input after <eps>"));
            }
            return Ok(MarkerString(out));
        }
        while !cur.at_end() {
            out.push(cur.marker()?);
            cur.skip_ws();
        }
        Ok(MarkerString(out))
    }
}

/// A Γ-tuple for a document of length `len`: a total map from Γ to sets of
/// 1-based positions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaTuple {
    len: usize,
    entries: BTreeMap<Attr, BTreeSet<usize>>,
}

impl GammaTuple {
    /// The empty tuple t^∅_Γ for a document of length `len`.
    pub fn empty(gamma: &AttrSet, len: usize) -> Self {
        GammaTuple {
            len,
            entries: gamma.iter().map(|a| (a.clone(), BTreeSet::new())).collect(),
        }
    }

    pub fn new(len: usize, entries: BTreeMap<Attr, BTreeSet<usize>>) -> Result<Self> {
        for (a, set) in &entries {
            if let Some(&p) = set.iter().find(|&&p| p == 0 || p > len) {
                return Err(Error::contract(format!(
                    "position {p} in entry '{a}' is outside 1..={len}"
                )));
            }
        }
        Ok(GammaTuple { len, entries })
    }

    /// `GammaTuple::from_entries(11, &[("x", &[2, 8]), ("y", &[2, 3])])`.
    pub fn from_entries(len: usize, entries: &[(&str, &[usize])]) -> Result<Self> {
        let map = entries
            .iter()
            .map(|(a, ps)| (Attr::new(a), ps.iter().copied().collect()))
            .collect();
        GammaTuple::new(len, map)
    }

    /// Length of the document this tuple is for.
    pub fn doc_len(&self) -> usize {
        self.len
    }

    pub fn gamma(&self) -> AttrSet {
        self.entries.keys().cloned().collect()
    }

    pub fn entries(&self) -> &BTreeMap<Attr, BTreeSet<usize>> {
        &self.entries
    }

    pub fn get(&self, attr: &str) -> Option<&BTreeSet<usize>> {
        self.entries.get(attr)
    }

    pub(crate) fn from_parts(len: usize, entries: BTreeMap<Attr, BTreeSet<usize>>) -> Self {
        GammaTuple { len, entries }
    }

    /// Pads with ∅-entries for every attribute of `target` missing here.
    pub fn pad(&self, target: &AttrSet) -> Result<GammaTuple> {
        if let Some(a) = self.entries.keys().find(|a| !target.contains(*a)) {
            return Err(Error::contract(format!(
                "cannot pad: attribute '{a}' is not in the target attribute set"
            )));
        }
        let mut entries = self.entries.clone();
        for a in target {
            entries.entry(a.clone()).or_default();
        }
        Ok(GammaTuple {
            len: self.len,
            entries,
        })
    }
}

impl fmt::Display for GammaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (a, set)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}: ")?;
            write_position_set(f, set)?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for GammaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Writes `{1,4}` / `{}`.
pub fn write_position_set(f: &mut impl fmt::Write, set: &BTreeSet<usize>) -> fmt::Result {
    f.write_str("{")?;
    for (i, p) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str("}")
}

/// Encodes `(w, t)` as the marker string W_{w,t}.
pub fn encode_tuple(w: &str, t: &GammaTuple) -> Result<MarkerString> {
    let chars: Vec<char> = w.chars().collect();
    if chars.len() != t.len {
        return Err(Error::contract(format!(
            "tuple is for length {}, document has length {}",
            t.len,
            chars.len()
        )));
    }
    let mut out: Vec<Marker> = chars.iter().map(|&c| Marker::bare(c)).collect();
    for (a, set) in &t.entries {
        for &p in set {
            out[p - 1].attrs.insert(a.clone());
        }
    }
    Ok(MarkerString(out))
}

/// A Γ-table: a set of Γ-tuples for one document length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GammaTable {
    gamma: AttrSet,
    len: usize,
    rows: BTreeSet<GammaTuple>,
}

impl GammaTable {
    pub fn new(gamma: AttrSet, doc_len: usize) -> Self {
        GammaTable {
            gamma,
            len: doc_len,
            rows: BTreeSet::new(),
        }
    }

    pub fn from_rows(
        gamma: AttrSet,
        doc_len: usize,
        rows: impl IntoIterator<Item = GammaTuple>,
    ) -> Result<Self> {
        let mut t = GammaTable::new(gamma, doc_len);
        for r in rows {
            t.insert(r)?;
        }
        Ok(t)
    }

    /// Inserts a row; returns whether it was new.
    pub fn insert(&mut self, row: GammaTuple) -> Result<bool> {
        if row.len != self.len {
            return Err(Error::contract(format!(
                "row is for length {}, table for length {}",
                row.len, self.len
            )));
        }
        if !row.entries.keys().eq(self.gamma.iter()) {
            return Err(Error::contract(format!(
                "row attributes {:?} differ from table attributes {:?}",
                row.gamma(),
                self.gamma
            )));
        }
        Ok(self.rows.insert(row))
    }

    pub(crate) fn insert_unchecked(&mut self, row: GammaTuple) {
        debug_assert_eq!(row.len, self.len);
        self.rows.insert(row);
    }

    pub fn gamma(&self) -> &AttrSet {
        &self.gamma
    }

    pub fn doc_len(&self) -> usize {
        self.len
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &GammaTuple> {
        self.rows.iter()
    }

    pub fn contains(&self, row: &GammaTuple) -> bool {
        self.rows.contains(row)
    }

    pub(crate) fn row_set(&self) -> &BTreeSet<GammaTuple> {
        &self.rows
    }

    /// Pads every row to `target ⊇ Γ`.
    pub fn pad(&self, target: &AttrSet) -> Result<GammaTable> {
        let mut out = GammaTable::new(target.clone(), self.len);
        for r in &self.rows {
            out.rows.insert(r.pad(target)?);
        }
        Ok(out)
    }
}

impl fmt::Display for GammaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GammaTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaTable")
            .field("gamma", &self.gamma)
            .field("doc_len", &self.len)
            .field("rows", &self.rows)
            .finish()
    }
}
