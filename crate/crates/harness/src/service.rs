//! WebSocket session service. Each connection carries one session; frames
//! are handled strictly in arrival order.

use std::future::Future;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use headpoint_core::geometry::ScreenGeometry;
use tokio::net::TcpListener;

use crate::pipeline::{Connection, Reply};
use crate::protocol::Outbound;

/// Path clients connect to.
pub const SESSION_PATH: &str = "/session";

#[derive(Debug, Clone, Copy)]
struct ServiceState {
    screen: ScreenGeometry,
}

/// `screen` is used for sessions whose hello names no screen.
pub fn router(screen: ScreenGeometry) -> Router {
    Router::new().route(SESSION_PATH, get(upgrade)).with_state(ServiceState { screen })
}

pub async fn serve(
    listener: TcpListener,
    screen: ScreenGeometry,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(screen)).with_graceful_shutdown(shutdown).await
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<ServiceState>) -> Response {
    ws.on_upgrade(move |socket| run_connection(socket, state.screen))
}

async fn run_connection(mut socket: WebSocket, screen: ScreenGeometry) {
    let mut connection = Connection::new(screen);
    while let Some(Ok(message)) = socket.recv().await {
        let reply = match message {
            Message::Text(text) => connection.handle_text(text.as_str()),
            Message::Binary(_) => {
                Reply { messages: vec![Outbound::error("binary frames are not supported")], close: false }
            }
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        for m in reply.messages {
            if socket.send(Message::Text(m.to_json().into())).await.is_err() {
                return;
            }
        }
        if reply.close {
            let _ = socket.send(Message::Close(None)).await;
            break;
        }
    }
}
