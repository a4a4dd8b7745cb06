//! Constraint-based recommendation: a user profile's preferences compile to
//! one constraint query over the vehicle catalog.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::{Graph, TriplePattern};
use crate::query::{execute, CompareOp, Diagnostics, FilterExpr, Projection, Query};
use crate::term::{Iri, Literal, Node, Term, Variable};
use crate::vocab::{self, Color, UserKind, VehicleType};

/// A user preference that can be relaxed. The declaration order is the
/// numbering of the default single-label diagnosis sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintLabel {
    Seats,
    VehicleType,
    Brand,
    Color,
    Mileage,
    Price,
}

impl ConstraintLabel {
    pub const ALL: [ConstraintLabel; 6] = [
        ConstraintLabel::Seats,
        ConstraintLabel::VehicleType,
        ConstraintLabel::Brand,
        ConstraintLabel::Color,
        ConstraintLabel::Mileage,
        ConstraintLabel::Price,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintLabel::Seats => "Seats",
            ConstraintLabel::VehicleType => "VehicleType",
            ConstraintLabel::Brand => "Brand",
            ConstraintLabel::Color => "Color",
            ConstraintLabel::Mileage => "Mileage",
            ConstraintLabel::Price => "Price",
        }
    }

    /// Accepts the English names and the French ones used in profiles
    /// (`Couleur`, `Marque`, `Prix`...), case-insensitively.
    pub fn parse(s: &str) -> Option<ConstraintLabel> {
        let lower = s.trim().to_lowercase();
        let label = match lower.as_str() {
            "seats" | "sièges" | "sieges" | "places" | "nombredesièges" | "nombredesieges" => ConstraintLabel::Seats,
            "vehicletype" | "typedevéhicule" | "typedevehicule" | "type" => ConstraintLabel::VehicleType,
            "brand" | "marque" => ConstraintLabel::Brand,
            "color" | "colour" | "couleur" => ConstraintLabel::Color,
            "mileage" | "kilométrage" | "kilometrage" | "maxkilométrage" | "maxkilometrage" => {
                ConstraintLabel::Mileage
            }
            "price" | "prix" | "budget" | "maxbudget" => ConstraintLabel::Price,
            _ => return None,
        };
        Some(label)
    }
}

impl fmt::Display for ConstraintLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Item-side properties of the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemProperty {
    Nom,
    Prix,
    TypeDeCarrosserie,
    NombreDeSieges,
    AnneeDuModele,
    Marque,
    Kilometrage,
    Couleur,
}

impl ItemProperty {
    pub const ALL: [ItemProperty; 8] = [
        ItemProperty::Nom,
        ItemProperty::Prix,
        ItemProperty::TypeDeCarrosserie,
        ItemProperty::NombreDeSieges,
        ItemProperty::AnneeDuModele,
        ItemProperty::Marque,
        ItemProperty::Kilometrage,
        ItemProperty::Couleur,
    ];

    /// Query variable names for the path's first hop and its final value.
    fn variable_names(self) -> (&'static str, &'static str) {
        match self {
            ItemProperty::Nom => ("nomNoeud", "nom"),
            ItemProperty::Prix => ("estimation", "prix"),
            ItemProperty::TypeDeCarrosserie => ("styleNoeud", "style"),
            ItemProperty::NombreDeSieges => ("places", "valeurPlaces"),
            ItemProperty::AnneeDuModele => ("anneeNoeud", "annee"),
            ItemProperty::Marque => ("marqueNoeud", "marque"),
            ItemProperty::Kilometrage => ("kilometrage", "valeurKilometrage"),
            ItemProperty::Couleur => ("couleurNoeud", "couleur"),
        }
    }

    /// Variable holding the property value once the path is walked.
    pub fn value_variable(self) -> Variable {
        Variable::new(self.variable_names().1).expect("static name")
    }
}

/// Where each item property lives in the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogSchema {
    pub item_class: Iri,
    /// Predicate chain from the item to the value.
    pub paths: BTreeMap<ItemProperty, Vec<Iri>>,
}

impl Default for CatalogSchema {
    fn default() -> Self {
        use vocab::*;
        let paths = [
            (ItemProperty::Nom, Vec::from([uvso(NOM)])),
            (ItemProperty::Prix, Vec::from([uvo(ESTIMATION), uvoo(A_VALEUR_MONETAIRE)])),
            (ItemProperty::TypeDeCarrosserie, Vec::from([uvso(STYLE_VEHICULE)])),
            (ItemProperty::NombreDeSieges, Vec::from([uvso(NOMBRE_DE_PLACES), gr(A_VALEUR_ENTIER)])),
            (ItemProperty::AnneeDuModele, Vec::from([uvso(ANNEE_DU_MODELE)])),
            (ItemProperty::Marque, Vec::from([uvso(A_FABRICANT)])),
            (ItemProperty::Kilometrage, Vec::from([uvso(KILOMETRAGE_ODOMETRE), gr(A_VALEUR_FLOAT)])),
            (ItemProperty::Couleur, Vec::from([uvso(COULEUR)])),
        ];
        CatalogSchema { item_class: uvso(AUTOMOBILE), paths: paths.into_iter().collect() }
    }
}

impl CatalogSchema {
    /// Every item property needs a non-empty path.
    pub fn validate(&self) -> Result<(), RecommendError> {
        match ItemProperty::ALL.into_iter().find(|p| self.paths.get(p).map_or(true, Vec::is_empty)) {
            Some(p) => Err(RecommendError::IncompleteSchema(p)),
            None => Ok(()),
        }
    }

    /// Patterns walking from `item` along the property's path; the last
    /// object is `end`.
    pub fn path_patterns(&self, item: &Term, prop: ItemProperty, end: Term) -> Vec<TriplePattern> {
        let path = &self.paths[&prop];
        let (hop, _) = prop.variable_names();
        let mut out = Vec::with_capacity(path.len());
        let mut from = item.clone();
        for (i, pred) in path.iter().enumerate() {
            let to = if i + 1 == path.len() {
                end.clone()
            } else if i == 0 {
                Term::var(hop)
            } else {
                Term::var(&format!("{hop}{i}"))
            };
            out.push(TriplePattern::new(from, pred.clone(), to.clone()));
            from = to;
        }
        out
    }

    /// Patterns binding the property value to [`ItemProperty::value_variable`].
    pub fn value_patterns(&self, item: &Term, prop: ItemProperty) -> Vec<TriplePattern> {
        self.path_patterns(item, prop, Term::Variable(prop.value_variable()))
    }
}

/// A user's preferences. Absent fields are not constraints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserProfile {
    pub user_id: String,
    pub vehicle_type: Option<VehicleType>,
    /// Acceptable colours; empty when the user did not state one.
    pub colors: BTreeSet<Color>,
    pub profil: Option<UserKind>,
    pub seats: Option<i64>,
    pub max_mileage: Option<i64>,
    pub brand: Option<String>,
    pub max_budget: Option<i64>,
    /// Optional lower price bound; only used together with `max_budget`.
    pub min_budget: Option<i64>,
    /// Supplied labels, most important first.
    pub rank: Vec<ConstraintLabel>,
}

impl UserProfile {
    pub fn supplies(&self, label: ConstraintLabel) -> bool {
        match label {
            ConstraintLabel::Seats => self.seats.is_some(),
            ConstraintLabel::VehicleType => self.vehicle_type.is_some(),
            ConstraintLabel::Brand => self.brand.is_some(),
            ConstraintLabel::Color => !self.colors.is_empty(),
            ConstraintLabel::Mileage => self.max_mileage.is_some(),
            ConstraintLabel::Price => self.max_budget.is_some(),
        }
    }

    pub fn supplied(&self) -> BTreeSet<ConstraintLabel> {
        ConstraintLabel::ALL.into_iter().filter(|l| self.supplies(*l)).collect()
    }

    /// Numeric values must be positive and `rank` must order exactly the
    /// supplied labels.
    pub fn validate(&self) -> Result<(), RecommendError> {
        let invalid = |reason: String| RecommendError::InvalidProfile { user: self.user_id.clone(), reason };
        for (name, v) in [
            ("seats", self.seats),
            ("max_mileage", self.max_mileage),
            ("max_budget", self.max_budget),
            ("min_budget", self.min_budget),
        ] {
            if let Some(v) = v {
                if v <= 0 {
                    return Err(invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (self.min_budget, self.max_budget) {
            if lo > hi {
                return Err(invalid(format!("min_budget {lo} exceeds max_budget {hi}")));
            }
        }
        if matches!(&self.brand, Some(b) if b.trim().is_empty()) {
            return Err(invalid("empty brand".to_string()));
        }
        let ranked: BTreeSet<_> = self.rank.iter().copied().collect();
        if ranked.len() != self.rank.len() || ranked != self.supplied() {
            return Err(invalid(format!(
                "rank {:?} is not a permutation of the supplied labels {:?}",
                self.rank,
                self.supplied()
            )));
        }
        Ok(())
    }
}

/// One compiled preference: patterns to join plus an optional filter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceConstraint {
    pub label: ConstraintLabel,
    pub patterns: Vec<TriplePattern>,
    pub filter: Option<FilterExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecommendError {
    #[error("profile does not supply a value for {0}")]
    MissingPreference(ConstraintLabel),
    #[error("invalid profile {user}: {reason}")]
    InvalidProfile { user: String, reason: String },
    #[error("catalog schema has no path for {0:?}")]
    IncompleteSchema(ItemProperty),
    #[error("no item satisfies the preferences of {user}")]
    Inconsistent { user: String },
}

/// The item variable of compiled queries.
pub fn item_variable() -> Variable {
    Variable::new("auto").expect("static name")
}

fn int(v: i64) -> FilterExpr {
    FilterExpr::constant(Literal::integer(v))
}

/// Compiles one preference against `schema`:
///
/// * Price: `prix <= max_budget`, plus `prix >= min_budget` when set.
/// * Mileage: `mileage < max_mileage`.
/// * Seats: the seat value must equal the requested count.
/// * Color: a disjunction of `contains(couleur, stem)`.
/// * Brand: `contains(str(marque), brand)` with the brand lower-cased.
/// * VehicleType: the style must be the requested type.
pub fn compile_constraint(
    label: ConstraintLabel,
    profile: &UserProfile,
    schema: &CatalogSchema,
) -> Result<PreferenceConstraint, RecommendError> {
    let missing = || RecommendError::MissingPreference(label);
    let item = Term::Variable(item_variable());
    let value = |p: ItemProperty| FilterExpr::Var(p.value_variable());
    let (patterns, filter) = match label {
        ConstraintLabel::Price => {
            let max = profile.max_budget.ok_or_else(missing)?;
            let mut f = FilterExpr::compare(CompareOp::Le, value(ItemProperty::Prix), int(max));
            if let Some(min) = profile.min_budget {
                f = FilterExpr::and(f, FilterExpr::compare(CompareOp::Ge, value(ItemProperty::Prix), int(min)));
            }
            (schema.value_patterns(&item, ItemProperty::Prix), Some(f))
        }
        ConstraintLabel::Mileage => {
            let max = profile.max_mileage.ok_or_else(missing)?;
            let f = FilterExpr::compare(CompareOp::Lt, value(ItemProperty::Kilometrage), int(max));
            (schema.value_patterns(&item, ItemProperty::Kilometrage), Some(f))
        }
        ConstraintLabel::Seats => {
            let n = profile.seats.ok_or_else(missing)?;
            (schema.path_patterns(&item, ItemProperty::NombreDeSieges, Term::Literal(Literal::integer(n))), None)
        }
        ConstraintLabel::Color => {
            let f = FilterExpr::any(profile.colors.iter().map(|c| {
                FilterExpr::contains(value(ItemProperty::Couleur), FilterExpr::constant(Literal::string(c.stem())))
            }))
            .ok_or_else(missing)?;
            (schema.value_patterns(&item, ItemProperty::Couleur), Some(f))
        }
        ConstraintLabel::Brand => {
            let brand = profile.brand.as_ref().ok_or_else(missing)?;
            let f = FilterExpr::contains(
                FilterExpr::str(value(ItemProperty::Marque)),
                FilterExpr::constant(Literal::string(brand.trim().to_lowercase())),
            );
            (schema.value_patterns(&item, ItemProperty::Marque), Some(f))
        }
        ConstraintLabel::VehicleType => {
            let t = profile.vehicle_type.ok_or_else(missing)?;
            (schema.path_patterns(&item, ItemProperty::TypeDeCarrosserie, Term::Iri(t.iri())), None)
        }
    };
    Ok(PreferenceConstraint { label, patterns, filter })
}

/// A profile with its compiled preferences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationTask {
    pub profile: UserProfile,
    pub schema: CatalogSchema,
    pub constraints: BTreeMap<ConstraintLabel, PreferenceConstraint>,
}

impl RecommendationTask {
    pub fn new(profile: UserProfile, schema: CatalogSchema) -> Result<Self, RecommendError> {
        schema.validate()?;
        profile.validate()?;
        let constraints = profile
            .supplied()
            .into_iter()
            .map(|l| compile_constraint(l, &profile, &schema).map(|c| (l, c)))
            .collect::<Result<_, _>>()?;
        Ok(RecommendationTask { profile, schema, constraints })
    }

    pub fn supplied(&self) -> BTreeSet<ConstraintLabel> {
        self.constraints.keys().copied().collect()
    }
}

/// Order in which compiled constraints are laid out in the query.
const QUERY_ORDER: [ConstraintLabel; 6] = [
    ConstraintLabel::Color,
    ConstraintLabel::Seats,
    ConstraintLabel::Brand,
    ConstraintLabel::VehicleType,
    ConstraintLabel::Mileage,
    ConstraintLabel::Price,
];

/// The constraint query for the `active` subset of the task's preferences:
/// `SELECT DISTINCT ?auto` over the item type pattern plus each active
/// constraint's patterns and filter.
pub fn compile_profile(task: &RecommendationTask, active: &BTreeSet<ConstraintLabel>) -> Result<Query, RecommendError> {
    let item = Term::Variable(item_variable());
    let mut q =
        Query::select_all(Vec::from([TriplePattern::new(item, vocab::rdf_type(), task.schema.item_class.clone())]));
    q.projection = Projection::Vars(Vec::from([item_variable()]));
    q.distinct = true;
    for label in QUERY_ORDER.into_iter().filter(|l| active.contains(l)) {
        let c = task.constraints.get(&label).ok_or(RecommendError::MissingPreference(label))?;
        q.bgp.extend(c.patterns.iter().cloned());
        q.filters.extend(c.filter.clone());
    }
    Ok(q)
}

/// Distinct matching items in term order, with evaluation diagnostics.
pub fn matching_items(
    graph: &Graph,
    task: &RecommendationTask,
    active: &BTreeSet<ConstraintLabel>,
) -> Result<(Vec<Iri>, Diagnostics), RecommendError> {
    let q = compile_profile(task, active)?;
    let res = execute(graph, &q);
    let var = item_variable();
    let mut items: Vec<Iri> = res
        .solutions
        .iter()
        .filter_map(|s| match s.get(&var) {
            Some(Node::Iri(i)) => Some(i.clone()),
            _ => None,
        })
        .collect();
    items.sort();
    items.dedup();
    Ok((items, res.diagnostics))
}

/// Number of distinct items consistent with the `active` preferences.
pub fn solution_count(
    graph: &Graph,
    task: &RecommendationTask,
    active: &BTreeSet<ConstraintLabel>,
) -> Result<usize, RecommendError> {
    matching_items(graph, task, active).map(|(items, _)| items.len())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recommendation {
    pub user_id: String,
    /// At most `k` items, in term order.
    pub items: Vec<Iri>,
    /// Total number of consistent items before truncation.
    pub count: usize,
    pub diagnostics: Diagnostics,
}

/// Recommends up to `k` items satisfying every supplied preference. The
/// graph is expected to be saturated already.
pub fn recommend(graph: &Graph, task: &RecommendationTask, k: usize) -> Result<Recommendation, RecommendError> {
    let (mut items, diagnostics) = matching_items(graph, task, &task.supplied())?;
    if items.is_empty() {
        return Err(RecommendError::Inconsistent { user: task.profile.user_id.clone() });
    }
    let count = items.len();
    items.truncate(k);
    Ok(Recommendation { user_id: task.profile.user_id.clone(), items, count, diagnostics })
}
