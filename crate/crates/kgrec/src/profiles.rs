//! User profiles as JSON lines, one record per user:
//!
//! ```json
//! {"user_id":"user0001","vehicle_type":"Berline","colors":["noir"],"seats":5,
//!  "max_mileage":100000,"brand":"Audi","max_budget":100000,"min_budget":20000,
//!  "rank":["Price","Color","Brand","VehicleType","Mileage","Seats"]}
//! ```
//!
//! Every preference field is optional; `rank` lists the supplied
//! preferences from most to least important.

use std::collections::BTreeSet;

use kgrec_core::recommender::{ConstraintLabel, UserProfile};
use kgrec_core::vocab::{Color, UserKind, VehicleType};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
#[error("line {line}: {message}")]
pub struct ProfileError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileRecord {
    pub user_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vehicle_type: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub colors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profil: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seats: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mileage: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brand: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_budget: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_budget: Option<i64>,
    #[serde(default)]
    pub rank: Vec<String>,
}

impl From<&UserProfile> for ProfileRecord {
    fn from(p: &UserProfile) -> Self {
        ProfileRecord {
            user_id: p.user_id.clone(),
            vehicle_type: p.vehicle_type.map(|t| t.local_name().to_string()),
            colors: p.colors.iter().map(|c| c.stem().to_string()).collect(),
            profil: p.profil.map(|k| k.local_name().to_string()),
            seats: p.seats,
            max_mileage: p.max_mileage,
            brand: p.brand.clone(),
            max_budget: p.max_budget,
            min_budget: p.min_budget,
            rank: p.rank.iter().map(|l| l.name().to_string()).collect(),
        }
    }
}

impl TryFrom<ProfileRecord> for UserProfile {
    type Error = String;

    fn try_from(r: ProfileRecord) -> Result<Self, String> {
        let vehicle_type = r
            .vehicle_type
            .map(|t| VehicleType::parse(&t).ok_or_else(|| format!("unknown vehicle type {t:?}")))
            .transpose()?;
        let colors: BTreeSet<Color> = r
            .colors
            .iter()
            .map(|c| Color::parse(&c.to_lowercase()).ok_or_else(|| format!("unknown colour {c:?}")))
            .collect::<Result<_, _>>()?;
        let profil =
            r.profil.map(|k| UserKind::parse(&k).ok_or_else(|| format!("unknown user profile {k:?}"))).transpose()?;
        let rank = r
            .rank
            .iter()
            .map(|l| ConstraintLabel::parse(l).ok_or_else(|| format!("unknown preference label {l:?}")))
            .collect::<Result<_, _>>()?;
        Ok(UserProfile {
            user_id: r.user_id,
            vehicle_type,
            colors,
            profil,
            seats: r.seats,
            max_mileage: r.max_mileage,
            brand: r.brand,
            max_budget: r.max_budget,
            min_budget: r.min_budget,
            rank,
        })
    }
}

/// Reads JSON lines; blank lines are skipped. Profiles are validated.
pub fn parse_profiles(text: &str) -> Result<Vec<UserProfile>, ProfileError> {
    let mut out: Vec<UserProfile> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| ProfileError { line: i + 1, message };
        let record: ProfileRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let profile = UserProfile::try_from(record).map_err(err)?;
        profile.validate().map_err(|e| err(e.to_string()))?;
        if out.iter().any(|p| p.user_id == profile.user_id) {
            return Err(err(format!("duplicate user_id {:?}", profile.user_id)));
        }
        out.push(profile);
    }
    Ok(out)
}

pub fn profiles_to_jsonl(profiles: &[UserProfile]) -> String {
    let mut out = String::new();
    for p in profiles {
        out.push_str(&serde_json::to_string(&ProfileRecord::from(p)).expect("profile records serialize"));
        out.push('\n');
    }
    out
}
