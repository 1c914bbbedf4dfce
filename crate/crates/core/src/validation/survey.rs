//! Survey ratings and respondent demographics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_enum {
    ($name:ident { $($variant:ident => $canon:literal $(| $alias:literal)*),+ $(,)? }) => {
        impl FromStr for $name {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($canon $(| $alias)* => Ok($name::$variant),)+
                    other => Err(Error::Survey(format!(
                        concat!("unknown ", stringify!($name), " {:?}"), other
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $canon,)+ })
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Gender,
    Class,
    Race,
}

string_enum!(Scale { Gender => "gender", Class => "class", Race => "race" });

impl Scale {
    pub const ALL: [Scale; 3] = [Scale::Gender, Scale::Class, Scale::Race];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sex {
    Male,
    Female,
}

string_enum!(Sex { Male => "male" | "m", Female => "female" | "f" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Education {
    /// Bachelor's degree or higher.
    Bachelor,
    LessThanBachelor,
}

string_enum!(Education {
    Bachelor => "bachelor" | "bachelors" | "ba" | "bachelor_or_more" | "degree",
    LessThanBachelor => "less_than_bachelor" | "less" | "no_bachelor" | "no_degree",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Race {
    White,
    Black,
    Other,
}

string_enum!(Race { White => "white", Black => "black" | "african_american" | "african american", Other => "other" });

/// One post-stratification cell: sex × education × race.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub sex: Sex,
    pub education: Education,
    pub race: Race,
}

impl Cell {
    /// All 2 × 2 × 3 cells.
    pub fn all() -> Vec<Cell> {
        let mut out = Vec::with_capacity(12);
        for sex in [Sex::Male, Sex::Female] {
            for education in [Education::Bachelor, Education::LessThanBachelor] {
                for race in [Race::White, Race::Black, Race::Other] {
                    out.push(Cell { sex, education, race });
                }
            }
        }
        out
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.sex, self.education, self.race)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Occupations,
    Clothing,
    Sports,
    Music,
    Vehicles,
    Food,
    Names,
}

string_enum!(Domain {
    Occupations => "occupations" | "occupation",
    Clothing => "clothing" | "clothes",
    Sports => "sports" | "sport",
    Music => "music" | "music genres",
    Vehicles => "vehicles" | "vehicle",
    Food => "food" | "foods",
    Names => "names" | "first names",
});

impl Domain {
    pub const ALL: [Domain; 7] = [
        Domain::Sports,
        Domain::Food,
        Domain::Music,
        Domain::Occupations,
        Domain::Vehicles,
        Domain::Clothing,
        Domain::Names,
    ];
}

/// Item → domain for the 57 words of the cultural-associations survey.
pub fn default_item_domains() -> BTreeMap<String, Domain> {
    let table: [(Domain, &[&str]); 7] = [
        (
            Domain::Occupations,
            &[
                "banker",
                "carpenter",
                "doctor",
                "engineer",
                "hairdresser",
                "journalist",
                "lawyer",
                "nanny",
                "nurse",
                "plumber",
                "scientist",
            ],
        ),
        (
            Domain::Clothing,
            &[
                "blouse",
                "briefcase",
                "dress",
                "necklace",
                "pants",
                "shirt",
                "shorts",
                "socks",
                "suit",
                "tuxedo",
            ],
        ),
        (
            Domain::Sports,
            &[
                "baseball",
                "basketball",
                "boxing",
                "golf",
                "hockey",
                "soccer",
                "softball",
                "tennis",
                "volleyball",
            ],
        ),
        (
            Domain::Music,
            &["bluegrass", "hiphop", "jazz", "opera", "punk", "rap", "techno"],
        ),
        (
            Domain::Vehicles,
            &[
                "bicycle",
                "limousine",
                "minivan",
                "motorcycle",
                "skateboard",
                "suv",
                "truck",
            ],
        ),
        (
            Domain::Food,
            &["beer", "cheesecake", "hamburger", "pastry", "salad", "steak"],
        ),
        (
            Domain::Names,
            &["aaliyah", "amy", "connor", "jake", "jamal", "molly", "shanice"],
        ),
    ];
    table
        .iter()
        .flat_map(|(d, items)| items.iter().map(move |i| (i.to_string(), *d)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub respondent_id: String,
    pub item: String,
    pub scale: Scale,
    pub rating: f64,
}

#[derive(Debug, Clone)]
pub struct SurveyDataset {
    responses: Vec<Response>,
    demographics: BTreeMap<String, Cell>,
    /// Keyed by lowercased item.
    domains: BTreeMap<String, Domain>,
}

#[derive(Deserialize)]
struct ResponseRow {
    respondent_id: String,
    item: String,
    scale: String,
    rating: f64,
}

#[derive(Deserialize)]
struct DemographicsRow {
    respondent_id: String,
    sex: String,
    education: String,
    race: String,
}

#[derive(Deserialize)]
struct ItemRow {
    item: String,
    domain: String,
}

fn read_rows<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Survey(format!("{}: {other:?}", path.display())),
        })?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::Survey(format!("{}: {e}", path.display()))))
        .collect()
}

impl SurveyDataset {
    pub fn new(responses: Vec<Response>, demographics: BTreeMap<String, Cell>) -> Result<Self> {
        for r in &responses {
            if !(0.0..=100.0).contains(&r.rating) {
                return Err(Error::Survey(format!(
                    "rating {} for {:?} by {:?} outside [0, 100]",
                    r.rating, r.item, r.respondent_id
                )));
            }
            if !demographics.contains_key(&r.respondent_id) {
                return Err(Error::Survey(format!(
                    "respondent {:?} has no demographics",
                    r.respondent_id
                )));
            }
        }
        Ok(SurveyDataset {
            responses,
            demographics,
            domains: default_item_domains(),
        })
    }

    /// Reads `responses.csv` (respondent_id,item,scale,rating) and
    /// `demographics.csv` (respondent_id,sex,education,race); an optional
    /// `items.csv` (item,domain) replaces the built-in domain tags.
    pub fn load(responses: impl AsRef<Path>, demographics: impl AsRef<Path>, items: Option<&Path>) -> Result<Self> {
        let rows: Vec<ResponseRow> = read_rows(responses.as_ref())?;
        let responses = rows
            .into_iter()
            .map(|r| {
                Ok(Response {
                    respondent_id: r.respondent_id,
                    item: r.item,
                    scale: r.scale.parse()?,
                    rating: r.rating,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let demo_rows: Vec<DemographicsRow> = read_rows(demographics.as_ref())?;
        let mut demographics = BTreeMap::new();
        for d in demo_rows {
            let cell = Cell {
                sex: d.sex.parse()?,
                education: d.education.parse()?,
                race: d.race.parse()?,
            };
            if demographics.insert(d.respondent_id.clone(), cell).is_some() {
                return Err(Error::Survey(format!("respondent {:?} listed twice", d.respondent_id)));
            }
        }
        let mut survey = SurveyDataset::new(responses, demographics)?;
        if let Some(items) = items {
            let rows: Vec<ItemRow> = read_rows(items)?;
            let domains = rows
                .into_iter()
                .map(|r| Ok((r.item.to_lowercase(), r.domain.parse()?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            survey = survey.with_domains(domains);
        }
        Ok(survey)
    }

    pub fn with_domains(mut self, domains: BTreeMap<String, Domain>) -> Self {
        self.domains = domains.into_iter().map(|(k, v)| (k.to_lowercase(), v)).collect();
        self
    }

    pub fn responses(&self) -> &[Response] {
        &self.responses
    }

    pub fn demographics(&self) -> &BTreeMap<String, Cell> {
        &self.demographics
    }

    pub fn cell_of(&self, respondent: &str) -> Option<Cell> {
        self.demographics.get(respondent).copied()
    }

    pub fn domain_of(&self, item: &str) -> Option<Domain> {
        self.domains.get(&item.to_lowercase()).copied()
    }

    /// Respondents with at least one response, sorted.
    pub fn respondents(&self) -> BTreeSet<&str> {
        self.responses.iter().map(|r| r.respondent_id.as_str()).collect()
    }

    /// Distinct items, sorted.
    pub fn items(&self) -> BTreeSet<&str> {
        self.responses.iter().map(|r| r.item.as_str()).collect()
    }

    /// Unweighted ratings of one item on one scale.
    pub fn ratings(&self, item: &str, scale: Scale) -> Vec<f64> {
        self.responses
            .iter()
            .filter(|r| r.item == item && r.scale == scale)
            .map(|r| r.rating)
            .collect()
    }

    /// Same survey with every item lowercased.
    pub fn lowercase_items(mut self) -> Self {
        for r in &mut self.responses {
            r.item = r.item.to_lowercase();
        }
        self
    }
}
