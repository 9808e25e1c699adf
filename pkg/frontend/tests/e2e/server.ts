// Spawns the real gateway for end-to-end tests and restarts it on demand
// (a restart with a modified descriptor is how descriptor changes reach a
// deployment).

import { spawn, type ChildProcess } from 'node:child_process';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

export function demoDescriptor(extraRouteCategory = false): Record<string, unknown> {
  const routeCategories = extraRouteCategory
    ? ['location', 'navigation', 'images']
    : ['location', 'navigation'];
  return {
    id: 'e2e-site',
    name: 'E2E site',
    services: [
      {
        id: 'route',
        name: 'Route planning',
        purpose: 'route-planning',
        data_categories: routeCategories,
        retention: 'less_than_month',
        accessors: [{ name: 'the system', kind: 'system_itself' }],
      },
      {
        id: 'gallery',
        name: 'Photo curation',
        purpose: 'product-recommendation',
        data_categories: ['images'],
        retention: 'less_than_year',
        accessors: [
          { name: 'the system', kind: 'system_itself' },
          { name: 'company A', kind: 'company' },
        ],
      },
      {
        id: 'translator',
        name: 'Language translation',
        purpose: 'language-translation',
        data_categories: [],
        retention: 'less_than_day',
        accessors: [],
      },
    ],
  };
}

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, '127.0.0.1', () => {
      const address = server.address();
      if (address && typeof address === 'object') {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error('no port'));
      }
    });
  });
}

export class GatewayProcess {
  private child: ChildProcess | null = null;
  readonly workDir: string;
  port = 0;

  constructor() {
    this.workDir = mkdtempSync(join(tmpdir(), 'clearsign-e2e-'));
  }

  get baseUrl(): string {
    return `http://127.0.0.1:${this.port}`;
  }

  private writeConfig(descriptor: Record<string, unknown>): string {
    const descriptorPath = join(this.workDir, 'descriptor.json');
    writeFileSync(descriptorPath, JSON.stringify(descriptor));
    const configPath = join(this.workDir, 'config.json');
    writeFileSync(
      configPath,
      JSON.stringify({
        listen_host: '127.0.0.1',
        listen_port: this.port,
        descriptor_path: descriptorPath,
        data_dir: join(this.workDir, 'state'),
      }),
    );
    return configPath;
  }

  async start(descriptor: Record<string, unknown>): Promise<void> {
    if (this.port === 0) this.port = await freePort();
    const configPath = this.writeConfig(descriptor);
    this.child = spawn('python3', ['-m', 'clearsign.cli', 'serve', configPath], {
      stdio: 'ignore',
    });
    await this.waitHealthy();
  }

  async restart(descriptor: Record<string, unknown>): Promise<void> {
    await this.stop();
    await this.start(descriptor);
  }

  async waitHealthy(timeoutMs = 20_000): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    let lastError: unknown = null;
    while (Date.now() < deadline) {
      try {
        const response = await fetch(`${this.baseUrl}/health`);
        if (response.ok) return;
      } catch (error) {
        lastError = error;
      }
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
    throw new Error(`gateway did not become healthy: ${lastError}`);
  }

  async stop(): Promise<void> {
    if (!this.child) return;
    const child = this.child;
    this.child = null;
    await new Promise<void>((resolve) => {
      child.once('exit', () => resolve());
      child.kill('SIGTERM');
      setTimeout(() => {
        child.kill('SIGKILL');
        resolve();
      }, 5_000).unref();
    });
  }
}
