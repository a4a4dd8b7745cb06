//! Fixed vehicle-domain vocabulary.
//!
//! Property and class names follow the vehicle ontology used by the
//! constraint queries (`uvso:couleur`, `uvso:nombreDePlaces`,
//! `uvoo:aValeurMonetaire`, ...). User-side terms live under `upo:`.

use alloc::string::String;

use crate::term::Iri;

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const UVSO: &str = "http://utc.fr/uvso/ns#";
pub const UVO: &str = "http://utc.fr/uvo/ns#";
pub const UVOO: &str = "http://utc.fr/uvoo/ns#";
pub const UPO: &str = "http://utc.fr/upo/ns#";
pub const GR: &str = "http://purl.org/goodrelations/v1#";

/// Prefix table used when writing queries and rules for this vocabulary.
pub const PREFIXES: &[(&str, &str)] = &[
    ("rdf", RDF),
    ("owl", OWL),
    ("xsd", crate::term::XSD),
    ("uvso", UVSO),
    ("uvo", UVO),
    ("uvoo", UVOO),
    ("upo", UPO),
    ("gr", GR),
];

pub fn iri(ns: &str, local: &str) -> Iri {
    let mut s = String::with_capacity(ns.len() + local.len());
    s.push_str(ns);
    s.push_str(local);
    Iri::new(s).expect("vocabulary IRIs are well-formed")
}

pub fn rdf_type() -> Iri {
    iri(RDF, "type")
}

pub fn owl_same_as() -> Iri {
    iri(OWL, "sameAs")
}

pub fn uvso(local: &str) -> Iri {
    iri(UVSO, local)
}

pub fn uvo(local: &str) -> Iri {
    iri(UVO, local)
}

pub fn uvoo(local: &str) -> Iri {
    iri(UVOO, local)
}

pub fn upo(local: &str) -> Iri {
    iri(UPO, local)
}

pub fn gr(local: &str) -> Iri {
    iri(GR, local)
}

// Classes.
pub const AUTOMOBILE: &str = "Automobile";
pub const CONTROLE_TECHNIQUE: &str = "ContrôleTechnique";
pub const PREFERENCE_DE_VEHICULE: &str = "PréférenceDeVéhicule";
pub const UTILISATEUR: &str = "Utilisateur";
pub const CONTEXTE: &str = "Contexte";

// Vehicle properties (uvso unless noted).
pub const NOM: &str = "nom";
pub const COULEUR: &str = "couleur";
pub const NOMBRE_DE_PLACES: &str = "nombreDePlaces";
pub const A_FABRICANT: &str = "AFabricant";
pub const STYLE_VEHICULE: &str = "StyleVehicule";
pub const KILOMETRAGE_ODOMETRE: &str = "KilometrageOdometre";
pub const ANNEE_DU_MODELE: &str = "anneeDuModele";
pub const DATE_DE_PRODUCTION: &str = "dateDeProduction";
pub const INSPECTE: &str = "inspecté";
pub const VALIDE_DE: &str = "valideDe";
pub const EST_REQUIS: &str = "estRequis";
/// `uvo:Estimation`
pub const ESTIMATION: &str = "Estimation";
/// `uvoo:aValeurMonetaire`
pub const A_VALEUR_MONETAIRE: &str = "aValeurMonetaire";
/// `gr:aValeurEntier`
pub const A_VALEUR_ENTIER: &str = "aValeurEntier";
/// `gr:aValeurFloat`
pub const A_VALEUR_FLOAT: &str = "aValeurFloat";

// User properties (upo).
pub const A_PREFERENCE: &str = "aPréférence";
pub const A_PROFIL: &str = "aProfil";
pub const A_LE_TYPE_DE_ROUTE_PREFERE: &str = "aLeTypeDeRoutePréféré";
pub const A_UN_TYPE_DE_VEHICULE_PREFERE: &str = "aUnTypeDeVéhiculePréféré";
pub const A_NOMBRE_DE_PLACES_MINIMUM: &str = "aNombreDePlacesMinimum";
pub const A_DATE: &str = "aDate";
pub const A_OBJECTIF: &str = "aObjectif";

/// Manufacturers, as lower-case `uvso:` local names.
pub const BRANDS: &[&str] = &["peugeot", "renault", "citroen", "audi", "volkswagen", "bmw", "toyota"];

pub fn brand_iri(brand: &str) -> Iri {
    uvso(brand)
}

/// Base colours a user can ask for. Vehicle colour strings contain the
/// masculine stem ("blanche nacrée" contains "blanc").
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Blanc,
    Bleu,
    Gris,
    Noir,
    Rouge,
}

impl Color {
    pub const ALL: [Color; 5] = [Color::Blanc, Color::Bleu, Color::Gris, Color::Noir, Color::Rouge];

    pub fn stem(self) -> &'static str {
        match self {
            Color::Blanc => "blanc",
            Color::Bleu => "bleu",
            Color::Gris => "gris",
            Color::Noir => "noir",
            Color::Rouge => "rouge",
        }
    }

    pub fn feminine(self) -> &'static str {
        match self {
            Color::Blanc => "blanche",
            Color::Bleu => "bleue",
            Color::Gris => "grise",
            Color::Noir => "noire",
            Color::Rouge => "rouge",
        }
    }

    /// Accepts either grammatical gender.
    pub fn parse(s: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.stem() == s || c.feminine() == s)
    }
}

/// Body styles. Style IRIs are shared with the preferred-type facts that
/// domain rules derive for users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VehicleType {
    Berline,
    Suv,
    Crossover,
    Van,
    Citadine,
}

impl VehicleType {
    pub const ALL: [VehicleType; 5] =
        [VehicleType::Berline, VehicleType::Suv, VehicleType::Crossover, VehicleType::Van, VehicleType::Citadine];

    pub fn local_name(self) -> &'static str {
        match self {
            VehicleType::Berline => "Berline",
            VehicleType::Suv => "SUV",
            VehicleType::Crossover => "Crossover",
            VehicleType::Van => "Van",
            VehicleType::Citadine => "Citadine",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            VehicleType::Berline => "sedan",
            VehicleType::Suv => "suv",
            VehicleType::Crossover => "crossover",
            VehicleType::Van => "van",
            VehicleType::Citadine => "citadine",
        }
    }

    pub fn iri(self) -> Iri {
        upo(self.local_name())
    }

    pub fn parse(s: &str) -> Option<VehicleType> {
        let lower = s.to_lowercase();
        match lower.as_str() {
            "berline" => Some(VehicleType::Berline),
            other => VehicleType::ALL.into_iter().find(|t| t.key() == other || t.local_name().to_lowercase() == other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UserKind {
    Etudiant,
    Parent,
    Professionnel,
}

impl UserKind {
    pub const ALL: [UserKind; 3] = [UserKind::Etudiant, UserKind::Parent, UserKind::Professionnel];

    pub fn local_name(self) -> &'static str {
        match self {
            UserKind::Etudiant => "utilisateurEtudiant",
            UserKind::Parent => "utilisateurParent",
            UserKind::Professionnel => "profilProfessionnel",
        }
    }

    pub fn iri(self) -> Iri {
        upo(self.local_name())
    }

    pub fn parse(s: &str) -> Option<UserKind> {
        UserKind::ALL.into_iter().find(|k| k.local_name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RouteType {
    LongDistance,
    Urban,
    Mixed,
}

impl RouteType {
    pub const ALL: [RouteType; 3] = [RouteType::LongDistance, RouteType::Urban, RouteType::Mixed];

    pub fn iri(self) -> Iri {
        upo(match self {
            RouteType::LongDistance => "longDistanceRoute",
            RouteType::Urban => "urbanRoute",
            RouteType::Mixed => "mixedRoute",
        })
    }
}

/// The two domain-knowledge rules: the inspection requirement for vehicles
/// older than four years, and SUV/Crossover for long-distance drivers.
pub const DOMAIN_RULES: &str = r#"@prefix uvso: <http://utc.fr/uvso/ns#> .
@prefix upo: <http://utc.fr/upo/ns#> .

# A vehicle older than 48 months needs an inspection younger than 6 months.
C_KB1: uvso:Automobile(?a) ∧ uvso:ContrôleTechnique(?c) ∧ uvso:inspecté(?a, ?c)
     ∧ uvso:dateDeProduction(?a, ?pdate) ∧ uvso:valideDe(?c, ?cdate)
     ∧ temporal:duration(?pdurée, ?pdate, "maintenant", "mois")
     ∧ temporal:duration(?cdurée, ?cdate, "maintenant", "mois")
     ∧ swrlb:greaterThan(?pdurée, 48) ∧ swrlb:greaterThan(?cdurée, 6)
     -> uvso:estRequis(?c, vrai) .

# Long-distance drivers are suited by an SUV or a Crossover.
C_KB2: upo:PréférenceDeVéhicule(?vpu) ∧ upo:aLeTypeDeRoutePréféré(?vpu, ?route)
     ∧ sameAs(?route, upo:longDistanceRoute)
     -> upo:aUnTypeDeVéhiculePréféré(?vpu, upo:SUV) ∧ upo:aUnTypeDeVéhiculePréféré(?vpu, upo:Crossover) .
"#;

/// Family profiles need more than three seats.
pub const FAMILY_RULE: &str = r#"@prefix upo: <http://utc.fr/upo/ns#> .

C_KB3: upo:PréférenceDeVéhicule(?vpu) ∧ upo:aProfil(?vpu, upo:utilisateurParent)
     -> upo:aNombreDePlacesMinimum(?vpu, 4) .
"#;
