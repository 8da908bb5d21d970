/** Thin gateway client. All scene state originates here; the UI never
 * computes state itself.
 */

import type {
  ErrorBody,
  GatewayEvent,
  ManifestDto,
  MutationResponse,
  SceneDocument,
  StepDto,
} from "./types.js";

export type FetchFn = typeof fetch;

export class GatewayError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class GatewayClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let code = `HTTP ${response.status}`;
      let message = response.statusText;
      try {
        const body = (await response.json()) as ErrorBody;
        code = body.error.code;
        message = body.error.message;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new GatewayError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  getScene(): Promise<SceneDocument> {
    return this.json<SceneDocument>("/scene");
  }

  async getSceneSnapshotText(): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/scene/snapshot`);
    if (!response.ok) throw new GatewayError(response.status, `HTTP ${response.status}`, "");
    return response.text();
  }

  async getSteps(): Promise<StepDto[]> {
    const body = await this.json<{ steps: StepDto[] }>("/steps");
    return body.steps;
  }

  getManifest(): Promise<ManifestDto> {
    return this.json<ManifestDto>("/manifest");
  }

  postNext(): Promise<MutationResponse> {
    return this.json<MutationResponse>("/session/next", { method: "POST" });
  }

  postPrevious(): Promise<MutationResponse> {
    return this.json<MutationResponse>("/session/previous", { method: "POST" });
  }

  postExtraction(rawTriple: string): Promise<MutationResponse> {
    return this.json<MutationResponse>("/extraction", {
      method: "POST",
      headers: { "content-type": "text/plain" },
      body: rawTriple,
    });
  }

  /** Stream newline-delimited events, invoking `onEvent` per line until
   * aborted or the connection drops (resolves on clean end, rejects on
   * transport error).
   */
  async streamEvents(
    since: number,
    onEvent: (event: GatewayEvent) => void,
    signal: AbortSignal,
  ): Promise<void> {
    const response = await this.fetchFn(`${this.baseUrl}/events?since=${since}`, { signal });
    if (!response.ok || response.body === null) {
      throw new GatewayError(response.status, `HTTP ${response.status}`, "event stream refused");
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) return;
      buffer += decoder.decode(value, { stream: true });
      let newline;
      while ((newline = buffer.indexOf("\n")) >= 0) {
        const line = buffer.slice(0, newline).trim();
        buffer = buffer.slice(newline + 1);
        if (line) onEvent(JSON.parse(line) as GatewayEvent);
      }
    }
  }
}
