//! HTTP routes.

use std::convert::Infallible;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::routing::{get, post};
use axum::{Json, Router};
use evc_core::Coord;
use futures::stream::{self, Stream};
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast::error::RecvError;

use crate::error::{ApiError, ServiceError};
use crate::session::{CreateSession, SessionView};
use crate::store::{RoundEvent, Store};

/// `POST /sessions/{id}/attack` body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackRequest {
    pub edge: (Coord, Coord),
    /// Version the client last saw; omitted means "whatever is current".
    #[serde(default)]
    pub version: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackList {
    pub version: u64,
    pub attacks: Vec<(Coord, Coord)>,
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/attacks", get(attacks))
        .route("/sessions/{id}/attack", post(attack))
        .route("/sessions/{id}/events", get(events))
        .with_state(store)
}

fn body<T>(req: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    req.map(|Json(t)| t).map_err(|e| ServiceError::BadRequest(e.body_text()).into())
}

async fn create(
    State(store): State<Arc<Store>>,
    req: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    Ok((StatusCode::CREATED, Json(store.create(body(req)?)?)))
}

async fn state(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(store.get(&id)?.view.clone()))
}

async fn attacks(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Json<AttackList>, ApiError> {
    let snap = store.get(&id)?;
    Ok(Json(AttackList { version: snap.view.version, attacks: snap.attacks.clone() }))
}

async fn attack(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    req: Result<Json<AttackRequest>, JsonRejection>,
) -> Result<Json<RoundEvent>, ApiError> {
    let req = body(req)?;
    Ok(Json(store.attack(&id, req.edge, req.version).await?))
}

async fn events(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let rx = store.subscribe(&id)?;
    let stream = stream::unfold(rx, |mut rx| async move {
        loop {
            match rx.recv().await {
                Ok(ev) => {
                    let data = serde_json::to_string(&ev).expect("event serializes");
                    let event = Event::default().event("round").id(ev.version.to_string()).data(data);
                    return Some((Ok(event), rx));
                }
                Err(RecvError::Lagged(_)) => continue,
                Err(RecvError::Closed) => return None,
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}
