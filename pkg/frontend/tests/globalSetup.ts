// Spawns a real API server over a small synthetic index for the integration
// specs. When the backend CLI is not on PATH the specs that need it skip.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

let server: ChildProcess | null = null;

function have(cmd: string, args: string[]): boolean {
  const result = spawnSync(cmd, args, { stdio: "ignore" });
  return result.status === 0;
}

async function waitForHealth(base: string, timeoutMs = 30_000): Promise<boolean> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${base}/health`);
      if (response.ok) return true;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  return false;
}

export default async function setup(): Promise<() => void> {
  if (!have("python3", ["--version"]) || !have("reviewscope", ["--help"])) {
    console.warn("[globalSetup] reviewscope backend not available; integration specs will skip");
    return () => {};
  }

  const dir = mkdtempSync(join(tmpdir(), "reviewscope-webui-"));
  const gen = spawnSync(
    "python3",
    ["-m", "reviewscope.synthdata", "data", "--reviews", "400", "--entities", "8", "--seed", "5"],
    { cwd: dir, stdio: "inherit" },
  );
  if (gen.status !== 0) throw new Error("synthetic data generation failed");
  const config = join(dir, "data", "reviewscope.cfg");
  const pre = spawnSync("reviewscope", ["--config", config, "preprocess"], {
    cwd: dir,
    stdio: "inherit",
  });
  if (pre.status !== 0) throw new Error("preprocess failed");

  const port = 8900 + Math.floor(Math.random() * 500);
  const base = `http://127.0.0.1:${port}`;
  server = spawn("reviewscope", ["--config", config, "serve", "--port", String(port)], {
    cwd: dir,
    stdio: "ignore",
  });
  if (!(await waitForHealth(base))) {
    server.kill();
    throw new Error("server did not come up");
  }
  process.env.REVIEWSCOPE_TEST_API = base;
  console.log(`[globalSetup] API server at ${base}`);

  return () => {
    server?.kill();
  };
}
