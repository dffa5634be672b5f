import type { AnswerEnvelope } from "./types.js";

/**
 * Thin client for the question-answering service. Keeps a single request in
 * flight: submitting again aborts the pending one.
 */
export class ApiClient {
  private pending: AbortController | null = null;

  constructor(private readonly baseUrl: string = "") {}

  async ask(question: string, domain?: string): Promise<AnswerEnvelope> {
    return this.post("/ask", question, domain);
  }

  async explain(question: string, domain?: string): Promise<AnswerEnvelope> {
    return this.post("/explain", question, domain);
  }

  async domains(): Promise<string[]> {
    const response = await fetch(`${this.baseUrl}/domains`);
    if (!response.ok) {
      throw new Error(`service error ${response.status}`);
    }
    const body = (await response.json()) as { domains: string[] };
    return body.domains;
  }

  cancelPending(): void {
    this.pending?.abort();
    this.pending = null;
  }

  private async post(path: string, question: string, domain?: string): Promise<AnswerEnvelope> {
    this.cancelPending();
    const controller = new AbortController();
    this.pending = controller;
    try {
      const response = await fetch(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(domain ? { question, domain } : { question }),
        signal: controller.signal,
      });
      if (!response.ok) {
        const detail = await response
          .json()
          .then((body: { detail?: string }) => body.detail)
          .catch(() => undefined);
        throw new Error(detail ?? `service error ${response.status}`);
      }
      return (await response.json()) as AnswerEnvelope;
    } finally {
      if (this.pending === controller) {
        this.pending = null;
      }
    }
  }
}
