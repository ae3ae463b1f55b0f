//! JSON model files. Identities are implicit (`id_<object>`), as are
//! composites with an identity and actions of identity morphisms.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse_cat;
use crate::finsem::model::{join_index, product_type, slot_types, split_index};
use crate::finsem::{AtomTable, FinCat, FunctorTable, Model, ModelError};
use crate::syntax::{CatExpr, Polarity, Slot};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub name: String,
    pub categories: BTreeMap<String, CatFile>,
    #[serde(default)]
    pub atoms: BTreeMap<String, AtomFile>,
    #[serde(default)]
    pub functors: BTreeMap<String, FunctorFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatFile {
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<MorphismFile>,
    #[serde(default)]
    pub composition: Vec<CompositeFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismFile {
    pub name: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeFile {
    pub first: String,
    pub second: String,
    pub result: String,
}

/// Slots are written `+ C` or `- C^op * D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomFile {
    pub slots: Vec<String>,
    /// One entry per tuple of slot objects; missing tuples are empty.
    #[serde(default)]
    pub sets: Vec<SetFile>,
    /// One entry per non-identity tuple of slot morphisms with a nonempty source.
    #[serde(default)]
    pub actions: Vec<ActionFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub at: Vec<String>,
    pub elems: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionFile {
    pub along: Vec<String>,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorFile {
    pub dom: Vec<String>,
    pub cod: String,
    /// Keyed by the name of a tuple of domain objects, e.g. `a` or `(a,b)`.
    pub objects: BTreeMap<String, String>,
    /// Non-identity morphisms only.
    #[serde(default)]
    pub morphisms: BTreeMap<String, String>,
}

fn format_err(msg: impl Into<String>) -> ModelError {
    ModelError::Format(msg.into())
}

fn cat_expr(text: &str) -> Result<CatExpr, ModelError> {
    parse_cat(text).map_err(|e| format_err(format!("bad category expression `{text}`: {e}")))
}

fn slot(text: &str) -> Result<Slot, ModelError> {
    let t = text.trim_start();
    let (pol, rest) = if let Some(r) = t.strip_prefix('+') {
        (Polarity::Pos, r)
    } else if let Some(r) = t.strip_prefix('-') {
        (Polarity::Neg, r)
    } else {
        return Err(format_err(format!("slot `{text}` must start with `+` or `-`")));
    };
    Ok(Slot::new(cat_expr(rest)?, pol))
}

fn show_slot(s: &Slot) -> String {
    format!("{} {}", if s.polarity == Polarity::Pos { "+" } else { "-" }, s.cat)
}

fn index_of(names: &[String], n: &str, what: &str, owner: &str) -> Result<usize, ModelError> {
    names.iter().position(|x| x == n).ok_or_else(|| format_err(format!("{owner}: unknown {what} `{n}`")))
}

fn load_cat(name: &str, c: &CatFile) -> Result<FinCat, ModelError> {
    let objects: Vec<&str> = c.objects.iter().map(String::as_str).collect();
    let arrows: Vec<(&str, &str, &str)> =
        c.morphisms.iter().map(|m| (m.name.as_str(), m.src.as_str(), m.dst.as_str())).collect();
    let comps: Vec<(&str, &str, &str)> =
        c.composition.iter().map(|t| (t.first.as_str(), t.second.as_str(), t.result.as_str())).collect();
    FinCat::new(name, &objects, &arrows, &comps)
}

fn load_atom(model: &Model, name: &str, a: &AtomFile) -> Result<AtomTable, ModelError> {
    let owner = format!("atom {name}");
    let slots = a.slots.iter().map(|s| slot(s)).collect::<Result<Vec<_>, _>>()?;
    let parts: Vec<FinCat> = slot_types(&slots).iter().map(|t| model.cat_of(t)).collect::<Result<_, _>>()?;
    let dom = model.cat_of(&product_type(&slot_types(&slots)))?;
    let obj_sizes: Vec<usize> = parts.iter().map(FinCat::n_obj).collect();
    let mor_sizes: Vec<usize> = parts.iter().map(FinCat::n_mor).collect();
    let mut elems = vec![Vec::new(); dom.n_obj()];
    let mut given = vec![false; dom.n_obj()];
    for s in &a.sets {
        if s.at.len() != parts.len() {
            return Err(format_err(format!("{owner}: set at {:?} needs {} objects", s.at, parts.len())));
        }
        let idx: Vec<usize> =
            s.at.iter().zip(&parts).map(|(n, c)| index_of(&c.objects, n, "object", &owner)).collect::<Result<_, _>>()?;
        let o = join_index(&idx, &obj_sizes);
        if given[o] {
            return Err(format_err(format!("{owner}: set at {:?} given twice", s.at)));
        }
        given[o] = true;
        elems[o] = s.elems.clone();
    }
    let mut action: Vec<Option<Vec<usize>>> = vec![None; dom.n_mor()];
    for o in 0..dom.n_obj() {
        action[dom.id(o)] = Some((0..elems[o].len()).collect());
    }
    for act in &a.actions {
        if act.along.len() != parts.len() {
            return Err(format_err(format!("{owner}: action along {:?} needs {} morphisms", act.along, parts.len())));
        }
        let idx: Vec<usize> = act
            .along
            .iter()
            .zip(&parts)
            .map(|(n, c)| {
                let names: Vec<String> = c.morphisms.iter().map(|m| m.name.clone()).collect();
                index_of(&names, n, "morphism", &owner)
            })
            .collect::<Result<_, _>>()?;
        let m = join_index(&idx, &mor_sizes);
        let (s, d) = (&elems[dom.src(m)], &elems[dom.dst(m)]);
        let mut row = Vec::with_capacity(s.len());
        for e in s {
            let img = act.map.get(e).ok_or_else(|| format_err(format!("{owner}: action along {:?} misses `{e}`", act.along)))?;
            row.push(index_of(d, img, "element", &owner)?);
        }
        action[m] = Some(row);
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(m, row)| match row {
            Some(r) => Ok(r),
            None if elems[dom.src(m)].is_empty() => Ok(Vec::new()),
            None => Err(format_err(format!("{owner}: no action along {}", dom.morphisms[m].name))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AtomTable { slots, elems, action })
}

fn load_functor(model: &Model, name: &str, f: &FunctorFile) -> Result<FunctorTable, ModelError> {
    let owner = format!("functor {name}");
    let dom_types = f.dom.iter().map(|d| cat_expr(d)).collect::<Result<Vec<_>, _>>()?;
    let cod_type = cat_expr(&f.cod)?;
    let dom = model.cat_of(&product_type(&dom_types))?;
    let cod = model.cat_of(&cod_type)?;
    let mut obj = Vec::with_capacity(dom.n_obj());
    for o in &dom.objects {
        let img = f.objects.get(o).ok_or_else(|| format_err(format!("{owner}: no image for object `{o}`")))?;
        obj.push(index_of(&cod.objects, img, "object", &owner)?);
    }
    let cod_names: Vec<String> = cod.morphisms.iter().map(|m| m.name.clone()).collect();
    let mut mor = Vec::with_capacity(dom.n_mor());
    for (m, info) in dom.morphisms.iter().enumerate() {
        if let Some(o) = dom.identity.iter().position(|&i| i == m) {
            mor.push(cod.id(obj[o]));
            continue;
        }
        let img = f.morphisms.get(&info.name).ok_or_else(|| format_err(format!("{owner}: no image for `{}`", info.name)))?;
        mor.push(index_of(&cod_names, img, "morphism", &owner)?);
    }
    Ok(FunctorTable { dom: dom_types, cod: cod_type, obj, mor })
}

impl ModelFile {
    /// Builds and validates the model.
    pub fn to_model(&self) -> Result<Model, ModelError> {
        let mut model = Model::new(&self.name);
        for (n, c) in &self.categories {
            model.cats.insert(n.clone(), load_cat(n, c)?);
        }
        for (n, a) in &self.atoms {
            let t = load_atom(&model, n, a)?;
            model.atoms.insert(n.clone(), t);
        }
        for (n, f) in &self.functors {
            let t = load_functor(&model, n, f)?;
            model.functors.insert(n.clone(), t);
        }
        model.validate()?;
        Ok(model)
    }

    pub fn from_model(m: &Model) -> Result<ModelFile, ModelError> {
        let mut categories = BTreeMap::new();
        for (n, c) in &m.cats {
            let is_id = |i: usize| c.identity.contains(&i);
            let mut composition = Vec::new();
            for f in (0..c.n_mor()).filter(|&f| !is_id(f)) {
                for g in (0..c.n_mor()).filter(|&g| !is_id(g)) {
                    if let Some(h) = c.compose[f][g] {
                        composition.push(CompositeFile {
                            first: c.morphisms[f].name.clone(),
                            second: c.morphisms[g].name.clone(),
                            result: c.morphisms[h].name.clone(),
                        });
                    }
                }
            }
            let morphisms = (0..c.n_mor())
                .filter(|&f| !is_id(f))
                .map(|f| MorphismFile {
                    name: c.morphisms[f].name.clone(),
                    src: c.objects[c.src(f)].clone(),
                    dst: c.objects[c.dst(f)].clone(),
                })
                .collect();
            categories.insert(n.clone(), CatFile { objects: c.objects.clone(), morphisms, composition });
        }
        let mut atoms = BTreeMap::new();
        for (n, t) in &m.atoms {
            let parts: Vec<FinCat> = slot_types(&t.slots).iter().map(|s| m.cat_of(s)).collect::<Result<_, _>>()?;
            let dom = m.cat_of(&product_type(&slot_types(&t.slots)))?;
            let obj_sizes: Vec<usize> = parts.iter().map(FinCat::n_obj).collect();
            let mor_sizes: Vec<usize> = parts.iter().map(FinCat::n_mor).collect();
            let sets = (0..dom.n_obj())
                .filter(|&o| !t.elems[o].is_empty())
                .map(|o| SetFile {
                    at: split_index(o, &obj_sizes).iter().zip(&parts).map(|(&i, c)| c.objects[i].clone()).collect(),
                    elems: t.elems[o].clone(),
                })
                .collect();
            let actions = (0..dom.n_mor())
                .filter(|&f| !dom.identity.contains(&f) && !t.elems[dom.src(f)].is_empty())
                .map(|f| {
                    let (s, d) = (&t.elems[dom.src(f)], &t.elems[dom.dst(f)]);
                    ActionFile {
                        along: split_index(f, &mor_sizes)
                            .iter()
                            .zip(&parts)
                            .map(|(&i, c)| c.morphisms[i].name.clone())
                            .collect(),
                        map: s.iter().zip(&t.action[f]).map(|(e, &i)| (e.clone(), d[i].clone())).collect(),
                    }
                })
                .collect();
            atoms.insert(n.clone(), AtomFile { slots: t.slots.iter().map(show_slot).collect(), sets, actions });
        }
        let mut functors = BTreeMap::new();
        for (n, t) in &m.functors {
            let dom = m.cat_of(&product_type(&t.dom))?;
            let cod = m.cat_of(&t.cod)?;
            let objects = dom.objects.iter().zip(&t.obj).map(|(o, &i)| (o.clone(), cod.objects[i].clone())).collect();
            let morphisms = (0..dom.n_mor())
                .filter(|f| !dom.identity.contains(f))
                .map(|f| (dom.morphisms[f].name.clone(), cod.morphisms[t.mor[f]].name.clone()))
                .collect();
            functors.insert(
                n.clone(),
                FunctorFile { dom: t.dom.iter().map(|d| d.to_string()).collect(), cod: t.cod.to_string(), objects, morphisms },
            );
        }
        Ok(ModelFile { name: m.name.clone(), categories, atoms, functors })
    }
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let f: ModelFile = serde_json::from_str(text).map_err(|e| format_err(format!("malformed model file: {e}")))?;
    f.to_model()
}

pub fn print_model(m: &Model) -> Result<String, ModelError> {
    let f = ModelFile::from_model(m)?;
    serde_json::to_string_pretty(&f).map_err(|e| format_err(e.to_string()))
}

/// Reads a model file; the model is named after the file stem when the file
/// does not name it.
pub fn load_model(path: &Path) -> Result<Model, std::io::Error> {
    let text = std::fs::read_to_string(path)?;
    let mut m = parse_model(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    if m.name.is_empty() {
        m.name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::model_suite;

    #[test]
    fn suite_models_round_trip() {
        for m in model_suite() {
            let text = print_model(&m).unwrap();
            assert_eq!(parse_model(&text).unwrap(), m, "{}", m.name);
        }
    }

    #[test]
    fn non_associative_tables_are_rejected() {
        let text = r#"{"categories": {"C": {"objects": ["o"],
            "morphisms": [{"name": "s", "src": "o", "dst": "o"}, {"name": "t", "src": "o", "dst": "o"}],
            "composition": [{"first": "s", "second": "s", "result": "t"}, {"first": "t", "second": "t", "result": "t"},
                            {"first": "s", "second": "t", "result": "t"}, {"first": "t", "second": "s", "result": "s"}]}}}"#;
        match parse_model(text) {
            Err(ModelError::Category { reason, .. }) => assert!(reason.contains("not associative"), "{reason}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_actions_are_reported() {
        let text = r#"{"categories": {"C": {"objects": ["a", "b"], "morphisms": [{"name": "f", "src": "a", "dst": "b"}]}},
            "atoms": {"P": {"slots": ["+ C"], "sets": [{"at": ["a"], "elems": ["x"]}, {"at": ["b"], "elems": ["y"]}]}}}"#;
        match parse_model(text) {
            Err(ModelError::Format(msg)) => assert!(msg.contains("no action along f"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }
}
