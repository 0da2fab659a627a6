//! WebSocket client helpers shared by the service tests.

use std::net::SocketAddr;

use futures_util::{SinkExt, StreamExt};
use headpoint_core::geometry::ScreenGeometry;
use headpoint_harness::protocol::Outbound;
use headpoint_harness::service;
use headpoint_harness::trace::TraceFile;
use tokio::net::TcpListener;
use tokio_tungstenite::tungstenite::Message;

pub async fn start_service() -> SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(service::serve(listener, ScreenGeometry::default(), std::future::pending()));
    addr
}

pub fn hello(trace: &TraceFile) -> String {
    let mut v = serde_json::to_value(&trace.spec).unwrap();
    v["type"] = "hello".into();
    v.to_string()
}

pub fn pose_frames(trace: &TraceFile) -> Vec<String> {
    trace.frames.iter().map(|f| serde_json::json!({"type": "pose", "t": f.t, "m": f.m}).to_string()).collect()
}

/// Sends `frames` while concurrently collecting every reply until the
/// server closes the connection.
pub async fn exchange(addr: SocketAddr, frames: Vec<String>) -> Vec<Outbound> {
    let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}{}", service::SESSION_PATH)).await.unwrap();
    let (mut sink, mut stream) = ws.split();
    let sender = tokio::spawn(async move {
        for f in frames {
            if sink.send(Message::text(f)).await.is_err() {
                break;
            }
        }
        sink
    });
    let mut received = Vec::new();
    while let Some(Ok(msg)) = stream.next().await {
        match msg {
            Message::Text(text) => received.push(serde_json::from_str(text.as_str()).unwrap()),
            Message::Close(_) => break,
            _ => {}
        }
    }
    drop(sender.await);
    received
}

/// Streams a whole trace: hello, every pose, end.
pub async fn stream_trace(addr: SocketAddr, trace: &TraceFile) -> Vec<Outbound> {
    let mut frames = vec![hello(trace)];
    frames.extend(pose_frames(trace));
    frames.push(r#"{"type":"end"}"#.to_string());
    exchange(addr, frames).await
}
