//! JSON wire formats. Rationals travel as `"p/q"` strings (plain `"p"`
//! for integers); renorm vectors as arrays of decimal strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::free::{FreeVector, PointFunction};
use crate::metric::{MetricSpace, PointMeta, ValidationReport};
use crate::rat::{fmt_rat, parse_rat, RatParseError};
use crate::renorm::{RenormError, RenormVector};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rat(#[from] RatParseError),
    #[error(transparent)]
    Metric(#[from] crate::metric::MetricError),
    #[error(transparent)]
    Free(#[from] crate::free::FreeError),
    #[error(transparent)]
    Renorm(#[from] RenormError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointDto {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDto {
    pub points: Vec<PointDto>,
    pub base: String,
    pub dist: Vec<Vec<String>>,
}

impl SpaceDto {
    pub fn from_space(space: &MetricSpace) -> Self {
        SpaceDto {
            points: space
                .points()
                .iter()
                .map(|p| PointDto {
                    id: p.id.clone(),
                    label: p.label.clone(),
                    coords: p.coords.as_ref().map(|cs| cs.iter().map(fmt_rat).collect()),
                })
                .collect(),
            base: space.base_id().to_owned(),
            dist: space
                .dist_matrix()
                .iter()
                .map(|row| row.iter().map(fmt_rat).collect())
                .collect(),
        }
    }

    pub fn parse_parts(&self) -> Result<(Vec<PointMeta>, String, Vec<Vec<crate::rat::Rat>>), IoError> {
        let points = self
            .points
            .iter()
            .map(|p| {
                let coords = match &p.coords {
                    None => None,
                    Some(cs) => {
                        Some(cs.iter().map(|c| parse_rat(c)).collect::<Result<Vec<_>, _>>()?)
                    }
                };
                Ok(PointMeta { id: p.id.clone(), label: p.label.clone(), coords })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|c| parse_rat(c)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok((points, self.base.clone(), dist))
    }

    pub fn into_space(&self) -> Result<MetricSpace, IoError> {
        let (points, base, dist) = self.parse_parts()?;
        Ok(MetricSpace::new(points, &base, dist)?)
    }

    /// Validation without constructing: reports every violated axiom.
    pub fn validate(&self) -> Result<ValidationReport, IoError> {
        let (points, base, dist) = self.parse_parts()?;
        Ok(crate::metric::validate_parts(&points, &base, &dist))
    }
}

pub fn space_to_json(space: &MetricSpace) -> String {
    serde_json::to_string_pretty(&SpaceDto::from_space(space)).expect("space serializes")
}

pub fn space_from_json(json: &str) -> Result<MetricSpace, IoError> {
    let dto: SpaceDto = serde_json::from_str(json)?;
    dto.into_space()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermDto {
    pub point: String,
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeVectorDto {
    pub terms: Vec<TermDto>,
}

impl FreeVectorDto {
    pub fn from_vector(mu: &FreeVector) -> Self {
        FreeVectorDto {
            terms: mu
                .terms()
                .iter()
                .map(|(point, coeff)| TermDto { point: point.clone(), coeff: fmt_rat(coeff) })
                .collect(),
        }
    }

    pub fn into_vector(&self, space: &MetricSpace) -> Result<FreeVector, IoError> {
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.point.clone(), parse_rat(&t.coeff)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(FreeVector::new(space, terms)?)
    }
}

pub fn free_vector_to_json(mu: &FreeVector) -> String {
    serde_json::to_string_pretty(&FreeVectorDto::from_vector(mu)).expect("vector serializes")
}

pub fn free_vector_from_json(space: &MetricSpace, json: &str) -> Result<FreeVector, IoError> {
    let dto: FreeVectorDto = serde_json::from_str(json)?;
    dto.into_vector(space)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionDto {
    pub values: BTreeMap<String, String>,
}

impl FunctionDto {
    pub fn from_function(f: &PointFunction) -> Self {
        FunctionDto {
            values: f.values().iter().map(|(k, v)| (k.clone(), fmt_rat(v))).collect(),
        }
    }

    pub fn into_function(&self, space: &MetricSpace, weight: bool) -> Result<PointFunction, IoError> {
        let values = self
            .values
            .iter()
            .map(|(k, v)| Ok((k.clone(), parse_rat(v)?)))
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok(if weight {
            PointFunction::weight(space, values)?
        } else {
            PointFunction::lip0(space, values)?
        })
    }
}

pub fn function_to_json(f: &PointFunction) -> String {
    serde_json::to_string_pretty(&FunctionDto::from_function(f)).expect("function serializes")
}

pub fn function_from_json(
    space: &MetricSpace,
    json: &str,
    weight: bool,
) -> Result<PointFunction, IoError> {
    let dto: FunctionDto = serde_json::from_str(json)?;
    dto.into_function(space, weight)
}

/// Renorm vectors: arrays of decimal strings.
pub fn renorm_vector_from_json(json: &str) -> Result<RenormVector, IoError> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(json)?;
    let coords = raw
        .iter()
        .map(|v| match v {
            serde_json::Value::String(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|_| RenormError::NonFinite),
            serde_json::Value::Number(x) => x.as_f64().ok_or(RenormError::NonFinite),
            _ => Err(RenormError::NonFinite),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RenormVector::new(coords)?)
}

pub fn renorm_vector_to_json(v: &RenormVector) -> String {
    let strings: Vec<String> = v.coords().iter().map(|c| format!("{c}")).collect();
    serde_json::to_string(&strings).expect("vector serializes")
}
