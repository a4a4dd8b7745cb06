//! Seeded synthetic vehicles, users and interactions in the fixed
//! vocabulary.
//!
//! Every vehicle carries 16 triples: type, name, colour, seats (node and
//! value), brand, style, mileage (node and value), price estimate (node and
//! value), model year, production date, and an inspection (link, type and
//! validity date). Each user adds 4 or 5 triples to the users graph. Values
//! are uniform over the ranges in [`GeneratorConfig`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphBuilder, Triple};
use crate::recommender::{ConstraintLabel, UserProfile};
use crate::term::{Date, Iri, Literal, Node};
use crate::vocab::{self, Color, UserKind, VehicleType, BRANDS};

/// Value ranges and sparsity of generated data.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    /// Fraction of the brand, colour and style domains that vehicles use, in
    /// (0, 1]. Profiles always draw from the full domains, so lowering it
    /// produces users nothing can satisfy.
    pub diversity: f64,
    /// Vehicle seat counts, drawn uniformly.
    pub seat_values: Vec<i64>,
    pub model_years: Vec<i32>,
    /// Inclusive vehicle price range, in whole euros.
    pub price: (i64, i64),
    /// Inclusive odometer range, in km.
    pub mileage: (i64, i64),
    /// Probability that a vehicle colour gets a finish word ("métallisée").
    pub finish_probability: f64,
    /// Probability that a profile states each preference.
    pub p_vehicle_type: f64,
    pub p_color: f64,
    pub p_seats: f64,
    pub p_mileage: f64,
    pub p_brand: f64,
    pub p_budget: f64,
    pub p_profil: f64,
    /// Probability that a second acceptable colour is added.
    pub p_second_color: f64,
    /// Inclusive ranges for profile limits.
    pub budget: (i64, i64),
    pub max_mileage: (i64, i64),
    /// Interactions per user are drawn from `0..=max_interactions`.
    pub max_interactions: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            diversity: 1.0,
            seat_values: Vec::from([2, 4, 5, 5, 7]),
            model_years: Vec::from([2018, 2019, 2020, 2021]),
            price: (5_000, 90_000),
            mileage: (1_000, 200_000),
            finish_probability: 0.3,
            p_vehicle_type: 0.5,
            p_color: 0.7,
            p_seats: 0.3,
            p_mileage: 0.5,
            p_brand: 0.6,
            p_budget: 0.8,
            p_profil: 0.8,
            p_second_color: 0.4,
            budget: (15_000, 100_000),
            max_mileage: (30_000, 200_000),
            max_interactions: 3,
        }
    }
}

/// One user-item event with its context triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionRecord {
    pub user: Iri,
    pub item: Iri,
    pub context: BTreeSet<Triple>,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub vehicles: Graph,
    pub users: Graph,
    pub profiles: Vec<UserProfile>,
    pub interactions: Vec<InteractionRecord>,
}

const FINISHES: &[&str] = &["métallisée", "nacrée", "mate"];
const OBJECTIVES: &[&str] = &["achat", "comparaison", "essai"];

pub fn vehicle_iri(i: usize) -> Iri {
    vocab::uvso(&format!("auto{i:05}"))
}

pub fn user_iri(i: usize) -> Iri {
    vocab::upo(&format!("user{i:04}"))
}

pub fn preference_iri(i: usize) -> Iri {
    vocab::upo(&format!("pref{i:04}"))
}

pub fn user_id(i: usize) -> String {
    format!("user{i:04}")
}

fn narrowed<T: Copy>(all: &[T], diversity: f64) -> Vec<T> {
    let d = if diversity > 0.0 && diversity <= 1.0 { diversity } else { 1.0 };
    let keep = ((d * all.len() as f64 + 0.5) as usize).clamp(1, all.len());
    all[..keep].to_vec()
}

/// Picks `domain[i]` for the first items so every value occurs at least
/// once, then draws uniformly.
fn covering<T: Copy>(rng: &mut ChaCha8Rng, domain: &[T], i: usize) -> T {
    if i < domain.len() {
        domain[i]
    } else {
        *domain.choose(rng).expect("non-empty domain")
    }
}

fn random_date(rng: &mut ChaCha8Rng, year: i32, max_month: u8) -> Date {
    let month = rng.gen_range(1..=max_month);
    let day = rng.gen_range(1..=28);
    Date::new(year, month, day).expect("day <= 28 is always valid")
}

fn capitalise(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn round_to(v: i64, step: i64) -> i64 {
    (v / step).max(1) * step
}

fn add_vehicle(b: &mut GraphBuilder, rng: &mut ChaCha8Rng, cfg: &GeneratorConfig, i: usize, domains: &Domains) {
    use vocab::*;
    let a = vehicle_iri(i);
    let brand = covering(rng, &domains.brands, i);
    let color = covering(rng, &domains.colors, i);
    let style = covering(rng, &domains.styles, i);
    let year = *cfg.model_years.choose(rng).expect("model years");
    let seats = *cfg.seat_values.choose(rng).expect("seat values");
    let price = round_to(rng.gen_range(cfg.price.0..=cfg.price.1), 100);
    let km = rng.gen_range(cfg.mileage.0..=cfg.mileage.1) as f64;

    let mut colour = String::from(if rng.gen_bool(0.5) { color.stem() } else { color.feminine() });
    if rng.gen_bool(cfg.finish_probability) {
        colour.push(' ');
        colour.push_str(FINISHES.choose(rng).expect("finishes"));
    }
    let produced = random_date(rng, year, 12);
    let inspection_year = rng.gen_range(year + 1..=2022);
    let inspected = random_date(rng, inspection_year, if inspection_year == 2022 { 2 } else { 12 });

    let node = |suffix: &str| uvso(&format!("auto{i:05}_{suffix}"));
    let (places, odo, estim, ct) = (node("places"), node("km"), node("prix"), node("ct"));
    let name = format!("{} {} {year}", capitalise(brand), style.local_name());
    for t in [
        Triple::new(a.clone(), rdf_type(), uvso(AUTOMOBILE)),
        Triple::new(a.clone(), uvso(NOM), Literal::string(name)),
        Triple::new(a.clone(), uvso(COULEUR), Literal::string(colour)),
        Triple::new(a.clone(), uvso(NOMBRE_DE_PLACES), places.clone()),
        Triple::new(places, gr(A_VALEUR_ENTIER), Literal::integer(seats)),
        Triple::new(a.clone(), uvso(A_FABRICANT), brand_iri(brand)),
        Triple::new(a.clone(), uvso(STYLE_VEHICULE), style.iri()),
        Triple::new(a.clone(), uvso(KILOMETRAGE_ODOMETRE), odo.clone()),
        Triple::new(odo, gr(A_VALEUR_FLOAT), Literal::float(km)),
        Triple::new(a.clone(), uvo(ESTIMATION), estim.clone()),
        Triple::new(estim, uvoo(A_VALEUR_MONETAIRE), Literal::integer(price)),
        Triple::new(a.clone(), uvso(ANNEE_DU_MODELE), Literal::integer(i64::from(year))),
        Triple::new(a.clone(), uvso(DATE_DE_PRODUCTION), Literal::Date(produced)),
        Triple::new(a, uvso(INSPECTE), ct.clone()),
        Triple::new(ct.clone(), rdf_type(), uvso(CONTROLE_TECHNIQUE)),
        Triple::new(ct, uvso(VALIDE_DE), Literal::Date(inspected)),
    ] {
        b.insert(t);
    }
}

struct Domains {
    brands: Vec<&'static str>,
    colors: Vec<Color>,
    styles: Vec<VehicleType>,
}

fn profile(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig, i: usize) -> UserProfile {
    let mut p = UserProfile { user_id: user_id(i), ..Default::default() };
    if rng.gen_bool(cfg.p_vehicle_type) {
        p.vehicle_type = VehicleType::ALL.choose(rng).copied();
    }
    if rng.gen_bool(cfg.p_color) {
        p.colors.insert(*Color::ALL.choose(rng).expect("colours"));
        if rng.gen_bool(cfg.p_second_color) {
            p.colors.insert(*Color::ALL.choose(rng).expect("colours"));
        }
    }
    if rng.gen_bool(cfg.p_profil) {
        p.profil = UserKind::ALL.choose(rng).copied();
    }
    if rng.gen_bool(cfg.p_seats) {
        p.seats = cfg.seat_values.choose(rng).copied();
    }
    if rng.gen_bool(cfg.p_mileage) {
        p.max_mileage = Some(round_to(rng.gen_range(cfg.max_mileage.0..=cfg.max_mileage.1), 1_000));
    }
    if rng.gen_bool(cfg.p_brand) {
        p.brand = BRANDS.choose(rng).map(|b| capitalise(b));
    }
    if rng.gen_bool(cfg.p_budget) {
        p.max_budget = Some(round_to(rng.gen_range(cfg.budget.0..=cfg.budget.1), 1_000));
    }
    let mut rank: Vec<ConstraintLabel> = p.supplied().into_iter().collect();
    rank.shuffle(rng);
    p.rank = rank;
    p
}

fn add_user(b: &mut GraphBuilder, rng: &mut ChaCha8Rng, i: usize, p: &UserProfile) {
    use vocab::*;
    let (u, pref) = (user_iri(i), preference_iri(i));
    let route = *RouteType::ALL.choose(rng).expect("routes");
    b.insert(Triple::new(u.clone(), rdf_type(), upo(UTILISATEUR)));
    b.insert(Triple::new(u, upo(A_PREFERENCE), pref.clone()));
    b.insert(Triple::new(pref.clone(), rdf_type(), upo(PREFERENCE_DE_VEHICULE)));
    b.insert(Triple::new(pref.clone(), upo(A_LE_TYPE_DE_ROUTE_PREFERE), route.iri()));
    if let Some(kind) = p.profil {
        b.insert(Triple::new(pref, upo(A_PROFIL), kind.iri()));
    }
}

fn interactions(rng: &mut ChaCha8Rng, cfg: &GeneratorConfig, i: usize, n_vehicles: usize) -> Vec<InteractionRecord> {
    use vocab::*;
    if n_vehicles == 0 {
        return Vec::new();
    }
    let n = rng.gen_range(0..=cfg.max_interactions);
    (0..n)
        .map(|j| {
            let ctx = upo(&format!("ctx{i:04}_{j}"));
            let date = random_date(rng, 2022, 2);
            let objective = OBJECTIVES.choose(rng).expect("objectives");
            let context = [
                Triple::new(ctx.clone(), rdf_type(), upo(CONTEXTE)),
                Triple::new(ctx.clone(), upo(A_DATE), Literal::Date(date)),
                Triple::new(ctx, upo(A_OBJECTIF), Literal::string(objective)),
            ]
            .into_iter()
            .collect();
            InteractionRecord {
                user: user_iri(i),
                item: vehicle_iri(rng.gen_range(0..n_vehicles)),
                context,
                kind: String::from("favori"),
            }
        })
        .collect()
}

/// Generates `n_vehicles` vehicles and `n_users` users. The output is a
/// pure function of the arguments.
pub fn generate(seed: u64, n_vehicles: usize, n_users: usize, cfg: &GeneratorConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domains = Domains {
        brands: narrowed(BRANDS, cfg.diversity),
        colors: narrowed(&Color::ALL, cfg.diversity),
        styles: narrowed(&VehicleType::ALL, cfg.diversity),
    };
    let mut vb = GraphBuilder::new();
    for i in 0..n_vehicles {
        add_vehicle(&mut vb, &mut rng, cfg, i, &domains);
    }
    let mut ub = GraphBuilder::new();
    let mut profiles = Vec::with_capacity(n_users);
    let mut inter = Vec::new();
    for i in 0..n_users {
        let p = profile(&mut rng, cfg, i);
        add_user(&mut ub, &mut rng, i, &p);
        inter.extend(interactions(&mut rng, cfg, i, n_vehicles));
        profiles.push(p);
    }
    Dataset { vehicles: vb.build(), users: ub.build(), profiles, interactions: inter }
}

/// Size and coverage summary of a graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphStats {
    pub triples: usize,
    /// Distinct instances per `rdf:type` class.
    pub classes: BTreeMap<Iri, usize>,
    /// Distinct subjects per predicate.
    pub properties: BTreeMap<Iri, usize>,
}

pub fn stats(graph: &Graph) -> GraphStats {
    let rdf_type = vocab::rdf_type();
    let mut classes: BTreeMap<Iri, usize> = BTreeMap::new();
    let mut subjects: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for t in graph.iter() {
        if t.predicate == rdf_type {
            if let Node::Iri(c) = &t.object {
                *classes.entry(c.clone()).or_default() += 1;
            }
        }
        subjects.entry(t.predicate).or_default().insert(t.subject);
    }
    GraphStats { triples: graph.len(), classes, properties: subjects.into_iter().map(|(p, s)| (p, s.len())).collect() }
}
