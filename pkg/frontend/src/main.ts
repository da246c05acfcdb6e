/** Bootstrap: open a session against the configured gateway and render. */

import { GatewayClient } from "./api";
import { openSession } from "./flows";
import { ConsoleUI } from "./ui";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("gateway") ?? "http://127.0.0.1:8000";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const client = new GatewayClient(baseUrl);
  try {
    const ctx = await openSession(client);
    new ConsoleUI(root, ctx).start();
  } catch {
    root.textContent = `cannot reach gateway at ${baseUrl} — start one with: crowdlabel serve configs/serve.conf`;
    setTimeout(boot, 2000);
  }
}

void boot();
