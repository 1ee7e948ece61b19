//! Feature expressions and feature models.
//!
//! A [`FeatureModel`] fixes an ordered list of feature names and a constraint
//! formula; its valid products are enumerated once, in canonical order, and
//! every [`FeatureExpr`] denotes a [`ProductSet`]: a bitset over the indices of
//! those valid products. All symbolic algorithms in this crate work on
//! `ProductSet`s, which makes equality of denotations a plain bitset compare.

use std::collections::HashMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not, Sub};

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Largest number of features the enumerative backend accepts.
pub const MAX_FEATURES: usize = 20;

const KEYWORDS: &[&str] = &[
    "features",
    "constraint",
    "states",
    "init",
    "trans",
    "action",
    "weight",
    "length",
    "true",
    "false",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("{0} features exceed the supported maximum of {MAX_FEATURES}")]
    TooManyFeatures(usize),
    #[error("the feature model admits no valid product")]
    NoValidProducts,
    #[error("product {0} is not a valid product of the feature model")]
    InvalidProduct(String),
}

/// Identifier syntax shared by feature and state names: a letter or `_`,
/// then word characters, with single `-` allowed between word characters.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars().peekable();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    let mut prev_dash = false;
    for c in chars {
        if c == '-' {
            if prev_dash {
                return false;
            }
            prev_dash = true;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            prev_dash = false;
        } else {
            return false;
        }
    }
    !prev_dash && !KEYWORDS.contains(&name)
}

/// Boolean formula over feature variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeatureExpr {
    True,
    False,
    Var(String),
    Not(Box<FeatureExpr>),
    And(Box<FeatureExpr>, Box<FeatureExpr>),
    Or(Box<FeatureExpr>, Box<FeatureExpr>),
}

impl FeatureExpr {
    pub fn var(name: impl Into<String>) -> Self {
        FeatureExpr::Var(name.into())
    }

    pub fn is_true(&self) -> bool {
        matches!(self, FeatureExpr::True)
    }

    /// Evaluates the formula under an assignment given as a lookup function.
    pub fn eval(&self, value_of: &dyn Fn(&str) -> bool) -> bool {
        match self {
            FeatureExpr::True => true,
            FeatureExpr::False => false,
            FeatureExpr::Var(v) => value_of(v),
            FeatureExpr::Not(e) => !e.eval(value_of),
            FeatureExpr::And(a, b) => a.eval(value_of) && b.eval(value_of),
            FeatureExpr::Or(a, b) => a.eval(value_of) || b.eval(value_of),
        }
    }

    /// Visits every variable occurrence, left to right.
    pub fn for_each_var<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            FeatureExpr::True | FeatureExpr::False => {}
            FeatureExpr::Var(v) => f(v),
            FeatureExpr::Not(e) => e.for_each_var(f),
            FeatureExpr::And(a, b) | FeatureExpr::Or(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            FeatureExpr::Or(..) => 1,
            FeatureExpr::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let needs_parens = self.precedence() < min;
        if needs_parens {
            f.write_str("(")?;
        }
        match self {
            FeatureExpr::True => f.write_str("true")?,
            FeatureExpr::False => f.write_str("false")?,
            FeatureExpr::Var(v) => f.write_str(v)?,
            FeatureExpr::Not(e) => {
                f.write_str("!")?;
                e.fmt_prec(f, 3)?;
            }
            // binary operators parse left-associatively, so a right operand
            // of the same precedence needs parentheses to round-trip
            FeatureExpr::And(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" && ")?;
                b.fmt_prec(f, 3)?;
            }
            FeatureExpr::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" || ")?;
                b.fmt_prec(f, 2)?;
            }
        }
        if needs_parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for FeatureExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Not for FeatureExpr {
    type Output = FeatureExpr;
    fn not(self) -> FeatureExpr {
        FeatureExpr::Not(Box::new(self))
    }
}

impl BitAnd for FeatureExpr {
    type Output = FeatureExpr;
    fn bitand(self, rhs: FeatureExpr) -> FeatureExpr {
        FeatureExpr::And(Box::new(self), Box::new(rhs))
    }
}

impl BitOr for FeatureExpr {
    type Output = FeatureExpr;
    fn bitor(self, rhs: FeatureExpr) -> FeatureExpr {
        FeatureExpr::Or(Box::new(self), Box::new(rhs))
    }
}

/// A product as a feature bitmask: bit `i` is set iff the `i`-th declared
/// feature is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Product(pub u32);

impl Product {
    pub fn has(self, feature: usize) -> bool {
        self.0 >> feature & 1 == 1
    }
}

/// A set of valid products, as a bitset over product indices of the owning
/// [`FeatureModel`]. Sets from different models must not be mixed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProductSet(FixedBitSet);

impl ProductSet {
    pub fn empty(universe: usize) -> Self {
        ProductSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        ProductSet(bits)
    }

    pub fn singleton(universe: usize, index: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(index);
        s
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(index)
    }

    pub fn insert(&mut self, index: usize) {
        self.0.insert(index);
    }

    pub fn is_subset(&self, other: &ProductSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &ProductSet) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn union_with(&mut self, other: &ProductSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &ProductSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn difference_with(&mut self, other: &ProductSet) {
        self.0.difference_with(&other.0);
    }

    /// Indices of the member products, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    /// Re-indexes `self ∩ within` into a universe of `within.len()` products,
    /// numbered by rank in `within`.
    pub fn compress(&self, within: &ProductSet) -> ProductSet {
        let mut out = ProductSet::empty(within.len());
        for (rank, p) in within.iter().enumerate() {
            if self.contains(p) {
                out.insert(rank);
            }
        }
        out
    }

    /// Inverse of [`ProductSet::compress`].
    pub fn expand(&self, within: &ProductSet) -> ProductSet {
        let mut out = ProductSet::empty(within.universe());
        let ranks: Vec<usize> = within.iter().collect();
        for rank in self.iter() {
            out.insert(ranks[rank]);
        }
        out
    }
}

impl fmt::Debug for ProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl BitAnd for &ProductSet {
    type Output = ProductSet;
    fn bitand(self, rhs: &ProductSet) -> ProductSet {
        ProductSet(&self.0 & &rhs.0)
    }
}

impl BitOr for &ProductSet {
    type Output = ProductSet;
    fn bitor(self, rhs: &ProductSet) -> ProductSet {
        ProductSet(&self.0 | &rhs.0)
    }
}

impl Sub for &ProductSet {
    type Output = ProductSet;
    fn sub(self, rhs: &ProductSet) -> ProductSet {
        let mut bits = self.0.clone();
        bits.difference_with(&rhs.0);
        ProductSet(bits)
    }
}

impl Not for &ProductSet {
    type Output = ProductSet;
    fn not(self) -> ProductSet {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        ProductSet(bits)
    }
}

/// Feature names, a constraint, and the enumerated valid products.
#[derive(Clone)]
pub struct FeatureModel {
    features: Vec<String>,
    constraint: FeatureExpr,
    products: Vec<Product>,
    index: HashMap<Product, usize>,
    literals: Vec<ProductSet>,
}

impl PartialEq for FeatureModel {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features && self.constraint == other.constraint
    }
}

impl Eq for FeatureModel {}

impl fmt::Debug for FeatureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FeatureModel")
            .field("features", &self.features)
            .field("constraint", &self.constraint)
            .field("products", &self.products.len())
            .finish()
    }
}

impl FeatureModel {
    pub fn new(features: Vec<String>, constraint: FeatureExpr) -> Result<Self, FeatureError> {
        if features.len() > MAX_FEATURES {
            return Err(FeatureError::TooManyFeatures(features.len()));
        }
        let mut positions = HashMap::new();
        for (i, name) in features.iter().enumerate() {
            if !is_identifier(name) {
                return Err(FeatureError::InvalidName(name.clone()));
            }
            if positions.insert(name.as_str(), i).is_some() {
                return Err(FeatureError::DuplicateFeature(name.clone()));
            }
        }
        let mut unknown = None;
        constraint.for_each_var(&mut |v| {
            if unknown.is_none() && !positions.contains_key(v) {
                unknown = Some(v.to_string());
            }
        });
        if let Some(v) = unknown {
            return Err(FeatureError::UnknownFeature(v));
        }

        let n = features.len();
        let mut products = Vec::new();
        for counter in 0u32..(1u32 << n) {
            // the first declared feature is the most significant bit of the
            // enumeration counter
            let mask = (0..n).fold(0u32, |m, i| m | ((counter >> (n - 1 - i)) & 1) << i);
            let product = Product(mask);
            if constraint.eval(&|v| product.has(positions[v])) {
                products.push(product);
            }
        }
        if products.is_empty() {
            return Err(FeatureError::NoValidProducts);
        }
        let index = products.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let literals = (0..n)
            .map(|f| {
                let mut set = ProductSet::empty(products.len());
                for (i, p) in products.iter().enumerate() {
                    if p.has(f) {
                        set.insert(i);
                    }
                }
                set
            })
            .collect();
        Ok(FeatureModel {
            features,
            constraint,
            products,
            index,
            literals,
        })
    }

    pub fn unconstrained<S: Into<String>>(
        features: impl IntoIterator<Item = S>,
    ) -> Result<Self, FeatureError> {
        Self::new(features.into_iter().map(Into::into).collect(), FeatureExpr::True)
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn constraint(&self) -> &FeatureExpr {
        &self.constraint
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    /// Valid products in canonical order: lexicographic on the feature
    /// bit-vector read in declaration order.
    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    pub fn product_index(&self, product: Product) -> Option<usize> {
        self.index.get(&product).copied()
    }

    pub fn product_features(&self, product: Product) -> Vec<&str> {
        (0..self.features.len())
            .filter(|&i| product.has(i))
            .map(|i| self.features[i].as_str())
            .collect()
    }

    /// Builds a product from feature names and checks it is valid.
    pub fn product_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<Product, FeatureError> {
        let mut mask = 0u32;
        for name in names {
            let i = self
                .feature_index(name.as_ref())
                .ok_or_else(|| FeatureError::UnknownFeature(name.as_ref().to_string()))?;
            mask |= 1 << i;
        }
        let product = Product(mask);
        match self.product_index(product) {
            Some(_) => Ok(product),
            None => Err(FeatureError::InvalidProduct(self.format_product(product))),
        }
    }

    /// `{A, B}` style rendering; `{}` for the empty product.
    pub fn format_product(&self, product: Product) -> String {
        format!("{{{}}}", self.product_features(product).join(", "))
    }

    pub fn all(&self) -> ProductSet {
        ProductSet::full(self.products.len())
    }

    pub fn none(&self) -> ProductSet {
        ProductSet::empty(self.products.len())
    }

    pub fn singleton(&self, index: usize) -> ProductSet {
        ProductSet::singleton(self.products.len(), index)
    }

    pub fn check_expr(&self, e: &FeatureExpr) -> Result<(), FeatureError> {
        let mut unknown = None;
        e.for_each_var(&mut |v| {
            if unknown.is_none() && self.feature_index(v).is_none() {
                unknown = Some(v.to_string());
            }
        });
        match unknown {
            Some(v) => Err(FeatureError::UnknownFeature(v)),
            None => Ok(()),
        }
    }

    /// The valid products satisfying `e`.
    pub fn denote(&self, e: &FeatureExpr) -> Result<ProductSet, FeatureError> {
        Ok(match e {
            FeatureExpr::True => self.all(),
            FeatureExpr::False => self.none(),
            FeatureExpr::Var(v) => {
                let i = self
                    .feature_index(v)
                    .ok_or_else(|| FeatureError::UnknownFeature(v.clone()))?;
                self.literals[i].clone()
            }
            FeatureExpr::Not(e) => !&self.denote(e)?,
            FeatureExpr::And(a, b) => &self.denote(a)? & &self.denote(b)?,
            FeatureExpr::Or(a, b) => &self.denote(a)? | &self.denote(b)?,
        })
    }

    /// Satisfiability by direct evaluation over the valid products; this is
    /// deliberately a different code path from [`FeatureModel::denote`].
    pub fn is_satisfiable(&self, e: &FeatureExpr) -> Result<bool, FeatureError> {
        self.check_expr(e)?;
        Ok(self.products.iter().any(|p| self.eval(e, *p)))
    }

    pub fn entails(&self, a: &FeatureExpr, b: &FeatureExpr) -> Result<bool, FeatureError> {
        Ok(self.denote(a)?.is_subset(&self.denote(b)?))
    }

    /// Evaluates `e` at one product; unknown variables evaluate to false.
    pub fn eval(&self, e: &FeatureExpr, product: Product) -> bool {
        e.eval(&|v| self.feature_index(v).is_some_and(|i| product.has(i)))
    }

    /// A formula denoting exactly `set`, built by Shannon expansion in
    /// declaration order with invalid products treated as don't-cares.
    pub fn render(&self, set: &ProductSet) -> FeatureExpr {
        self.render_cube(0, &self.all(), set)
    }

    fn render_cube(&self, feature: usize, cube: &ProductSet, set: &ProductSet) -> FeatureExpr {
        let target = cube & set;
        if target.is_empty() {
            return FeatureExpr::False;
        }
        if &target == cube {
            return FeatureExpr::True;
        }
        let lit = &self.literals[feature];
        let with = cube & lit;
        let without = cube - lit;
        if with.is_empty() {
            return self.render_cube(feature + 1, &without, set);
        }
        if without.is_empty() {
            return self.render_cube(feature + 1, &with, set);
        }
        let hi = self.render_cube(feature + 1, &with, set);
        let lo = self.render_cube(feature + 1, &without, set);
        let x = || FeatureExpr::var(self.features[feature].clone());
        use FeatureExpr::{False, True};
        match (hi, lo) {
            (hi, lo) if hi == lo => hi,
            (True, False) => x(),
            (False, True) => !x(),
            (True, lo) => x() | lo,
            (hi, False) => x() & hi,
            (False, lo) => !x() & lo,
            (hi, True) => !x() | hi,
            (hi, lo) => (x() & hi) | (!x() & lo),
        }
    }
}
