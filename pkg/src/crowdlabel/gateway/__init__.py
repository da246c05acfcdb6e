"""HTTP/JSON gateway: the live-system surface human workers consume."""

from .app import GatewayService, create_app, create_live_app

__all__ = ["GatewayService", "create_app", "create_live_app"]
