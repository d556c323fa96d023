import { existsSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ReviewController, type ViewModel } from "../src/controller.js";
import { FIXTURE_SNIPPET, MockService, type RecordedRequest } from "./mock_service.js";

const GOLDEN_PATH = join(dirname(fileURLToPath(import.meta.url)), "golden_interaction.json");

function makeController(service: MockService): ReviewController {
  return new ReviewController(new ApiClient("http://svc", service.fetch));
}

function digest(view: ViewModel) {
  return {
    phase: view.phase,
    state: view.session?.state ?? null,
    sessionId: view.session?.session_id ?? null,
    editorText: view.editorText,
    dirty: view.dirty,
    banner: view.banner,
    emptyMessage: view.emptyMessage,
    controls: view.controls,
    checklist: view.checklist,
    confirmedBody: view.confirmation?.answer_body ?? null,
  };
}

describe("ReviewController", () => {
  it("replays the scripted edit-approve session identically to the golden transcript", async () => {
    const service = new MockService();
    const controller = makeController(service);
    const transcript: Array<{
      action: string;
      requests: RecordedRequest[];
      view: ReturnType<typeof digest>;
    }> = [];

    async function step(action: string, run: () => Promise<void> | void) {
      const before = service.requests.length;
      await run();
      transcript.push({
        action,
        requests: service.requests.slice(before),
        view: digest(controller.snapshot()),
      });
    }

    await step("poll", () => controller.refresh());
    await step("edit", () => controller.edit("Improved answer:\n```\n" + FIXTURE_SNIPPET + "\n```"));
    await step("save", () => controller.save());
    await step("tick-completeness", () => controller.tick("completeness", true));
    await step("approve", () => controller.approve());
    await step("poll-after-submit", () => controller.refresh());

    // outbox confirmation is visible and carries the edited body
    expect(service.outbox).toHaveLength(1);
    expect(transcript[4].view.confirmedBody).toBe(service.outbox[0].answer_body);
    expect(transcript[5].view.phase).toBe("confirmed");

    if (process.env.REGEN_GOLDEN || !existsSync(GOLDEN_PATH)) {
      writeFileSync(GOLDEN_PATH, JSON.stringify(transcript, null, 2));
    }
    const golden = JSON.parse(readFileSync(GOLDEN_PATH, "utf-8"));
    expect(transcript).toEqual(golden);
  });

  it("renders the empty state with the next suggestion time", async () => {
    const service = new MockService();
    service.session = null;
    const controller = makeController(service);
    await controller.refresh();
    const view = controller.snapshot();
    expect(view.phase).toBe("empty");
    expect(view.emptyMessage).toBe(
      "No suggestion right now - next suggestion at 2019-06-01T06:00:00+00:00",
    );
    expect(Object.values(view.controls).every((enabled) => !enabled)).toBe(true);
  });

  it("never issues a request for a disabled control", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    await controller.approve();
    const after = service.requests.length;
    await controller.approve(); // controls now disabled; nothing may go out
    await controller.save();
    await controller.decline();
    await controller.regenerate();
    expect(service.requests.length).toBe(after);
  });

  it("recovers from a 409 by reloading and showing a banner", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    controller.edit("race edit");
    // another client approves+submits behind our back
    service.session!.state = "submitted";
    await controller.save();
    const view = controller.snapshot();
    expect(view.banner).toContain("view reloaded");
    // reload saw no active session -> rate-limited empty state, not a crash
    expect(view.phase).toBe("empty");
  });

  it("edits are local until save confirms them", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    controller.edit("draft in progress");
    let view = controller.snapshot();
    expect(view.dirty).toBe(true);
    expect(view.persistedBody).toBeNull();
    expect(service.session!.edited_body).toBeNull();
    await controller.save();
    view = controller.snapshot();
    expect(view.dirty).toBe(false);
    expect(view.persistedBody).toBe("draft in progress");
  });

  it("draft text round-trips byte-identically through edit, save, reload", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    const gnarly = 'a	tab\n"quotes" \\slash\\ üñîçødé →\nfinal line ';
    controller.edit(gnarly);
    await controller.save();
    await controller.refresh();
    expect(controller.snapshot().editorText).toBe(gnarly);
    expect(service.session!.edited_body).toBe(gnarly);
  });

  it("declining frees the view", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    await controller.decline();
    const view = controller.snapshot();
    expect(view.phase).toBe("empty");
    expect(view.emptyMessage).toBe("Suggestion declined");
    expect(service.session!.state).toBe("declined");
  });

  it("serializes overlapping writes in issue order", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    controller.edit("final body");
    const save = controller.save();
    const decline = controller.decline(); // queued strictly behind the save
    await Promise.all([save, decline]);
    const mutations = service.requests
      .filter((r) => r.method !== "GET")
      .map((r) => r.path.split("/").pop());
    expect(mutations).toEqual(["answer", "decline"]);
    expect(service.session!.edited_body).toBe("final body");
    expect(service.session!.state).toBe("declined");
  });

  it("a queued save sends the latest editor buffer, never a stale one", async () => {
    const service = new MockService();
    const controller = makeController(service);
    await controller.refresh();
    controller.edit("first");
    const a = controller.save();
    controller.edit("second");
    const b = controller.save();
    await Promise.all([a, b]);
    const puts = service.requests.filter((r) => r.method === "PUT");
    expect(puts.length).toBe(1);
    expect((puts[0].body as { body: string }).body).toBe("second");
    expect(service.session!.edited_body).toBe("second");
  });
});
