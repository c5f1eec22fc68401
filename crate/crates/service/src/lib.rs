//! HTTP/JSON service: book upload and asynchronous graph build, warm-start
//! test, learning/testing sessions and the open learner model view.

pub mod config;
pub mod error;
pub mod routes;
pub mod state;
pub mod store;

use std::sync::Arc;

pub use config::ServiceConfig;
pub use routes::router;
pub use state::AppState;

/// Opens the data directory and returns the application router.
pub async fn app(config: ServiceConfig) -> lexigraph_core::Result<(Arc<AppState>, axum::Router)> {
    let state = tokio::task::spawn_blocking(move || AppState::open(config))
        .await
        .expect("state loading does not panic")?;
    Ok((Arc::clone(&state), router(state)))
}

/// Serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let bind = config.bind;
    let (_, router) = app(config).await.map_err(std::io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
