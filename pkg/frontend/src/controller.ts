/** Review-flow controller: polls the service, holds the view model, and
 * serializes every write so mutations cannot interleave.
 *
 * Edits are never shown as persisted until the server confirms them: the
 * editor buffer lives in `editorText` while `persistedBody` tracks what the
 * server last returned.
 */

import { ApiClient, ApiError, isNoAssignment } from "./api.js";
import { controlsFor, type Controls } from "./state.js";
import {
  emptyChecklist,
  type AssignmentView,
  type Checklist,
  type OutboxView,
  type PostView,
  type QualityCriterion,
} from "./types.js";

export type Phase = "loading" | "empty" | "assigned" | "confirmed";

export interface ViewModel {
  phase: Phase;
  emptyMessage: string;
  banner: string;
  session: AssignmentView | null;
  post: PostView | null;
  editorText: string;
  persistedBody: string | null;
  dirty: boolean;
  controls: Controls;
  checklist: Checklist;
  confirmation: OutboxView | null;
}

const DISABLED: Controls = {
  canEdit: false,
  canSave: false,
  canRegenerate: false,
  canApprove: false,
  canDecline: false,
};

function initialView(): ViewModel {
  return {
    phase: "loading",
    emptyMessage: "",
    banner: "",
    session: null,
    post: null,
    editorText: "",
    persistedBody: null,
    dirty: false,
    controls: { ...DISABLED },
    checklist: emptyChecklist(),
    confirmation: null,
  };
}

export type RenderListener = (view: ViewModel) => void;

export class ReviewController {
  readonly api: ApiClient;
  private view: ViewModel = initialView();
  private listeners: RenderListener[] = [];
  private writeChain: Promise<unknown> = Promise.resolve();

  constructor(api: ApiClient) {
    this.api = api;
  }

  onRender(listener: RenderListener): void {
    this.listeners.push(listener);
  }

  snapshot(): ViewModel {
    return JSON.parse(JSON.stringify(this.view)) as ViewModel;
  }

  private render(): void {
    const frozen = this.snapshot();
    for (const listener of this.listeners) listener(frozen);
  }

  private setSession(session: AssignmentView): void {
    const previousId = this.view.session?.session_id;
    this.view.session = session;
    this.view.phase = "assigned";
    this.view.emptyMessage = "";
    if (previousId !== session.session_id) {
      this.view.checklist = emptyChecklist();
      this.view.confirmation = null;
      this.view.post = null;
    }
    this.view.persistedBody = session.edited_body;
    if (!this.view.dirty) {
      this.view.editorText = session.edited_body ?? session.draft?.snippet ?? "";
    }
    this.view.controls = controlsFor(session.state, this.view.dirty);
  }

  /** One poll tick: fetch the assignment and, when new, its post. */
  async refresh(): Promise<void> {
    try {
      const outcome = await this.api.getAssignment();
      if (isNoAssignment(outcome)) {
        if (this.view.phase !== "confirmed") {
          this.view.phase = "empty";
          this.view.session = null;
          this.view.post = null;
          this.view.controls = { ...DISABLED };
          this.view.emptyMessage = outcome.retryAt
            ? `No suggestion right now - next suggestion at ${outcome.retryAt}`
            : "No suggestion right now";
        }
        this.render();
        return;
      }
      const hadId = this.view.session?.session_id;
      this.setSession(outcome);
      if (!this.view.post || hadId !== outcome.session_id) {
        this.view.post = await this.api.getPost(outcome.question_id);
      }
      this.render();
    } catch (error) {
      this.view.banner = error instanceof Error ? error.message : String(error);
      this.render();
    }
  }

  /** Local edit only; nothing is persisted until save(). */
  edit(text: string): void {
    if (!this.view.controls.canEdit) return;
    this.view.editorText = text;
    this.view.dirty = text !== (this.view.persistedBody ?? this.view.session?.draft?.snippet ?? "");
    this.view.controls = controlsFor(this.view.session!.state, this.view.dirty);
    this.render();
  }

  tick(criterion: QualityCriterion, value: boolean): void {
    this.view.checklist[criterion] = value;
    this.render();
  }

  /** Serialize writes: each mutation waits for the previous one. */
  private enqueue<T>(work: () => Promise<T>): Promise<T> {
    const next = this.writeChain.then(work, work);
    this.writeChain = next.catch(() => undefined);
    return next;
  }

  private async handleConflict(error: unknown): Promise<boolean> {
    if (error instanceof ApiError && error.conflict) {
      this.view.banner = `Server refused the transition (${error.detail}); view reloaded.`;
      this.view.dirty = false;
      await this.refresh();
      return true;
    }
    return false;
  }

  save(): Promise<void> {
    return this.enqueue(async () => {
      const session = this.view.session;
      if (!session || !this.view.controls.canSave) return;
      try {
        const updated = await this.api.putAnswer(session.session_id, this.view.editorText);
        this.view.dirty = false;
        this.view.banner = "";
        this.setSession(updated);
        this.render();
      } catch (error) {
        if (!(await this.handleConflict(error))) throw error;
      }
    });
  }

  approve(): Promise<void> {
    return this.enqueue(async () => {
      const session = this.view.session;
      if (!session || !this.view.controls.canApprove) return;
      try {
        const record = await this.api.approve(session.session_id);
        this.view.confirmation = record;
        this.view.phase = "confirmed";
        this.view.banner = "";
        this.view.session = { ...session, state: "submitted" };
        this.view.controls = { ...DISABLED };
        this.render();
      } catch (error) {
        if (!(await this.handleConflict(error))) throw error;
      }
    });
  }

  decline(): Promise<void> {
    return this.enqueue(async () => {
      const session = this.view.session;
      if (!session || !this.view.controls.canDecline) return;
      try {
        await this.api.decline(session.session_id);
        this.view.session = null;
        this.view.phase = "empty";
        this.view.emptyMessage = "Suggestion declined";
        this.view.controls = { ...DISABLED };
        this.render();
      } catch (error) {
        if (!(await this.handleConflict(error))) throw error;
      }
    });
  }

  regenerate(): Promise<void> {
    return this.enqueue(async () => {
      const session = this.view.session;
      if (!session || !this.view.controls.canRegenerate) return;
      try {
        const updated = await this.api.regenerateDraft(session.session_id);
        this.view.dirty = false;
        this.setSession(updated);
        this.render();
      } catch (error) {
        if (!(await this.handleConflict(error))) throw error;
      }
    });
  }
}
