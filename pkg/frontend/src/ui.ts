/**
 * DOM layer. Renders three screens per job: live job cards, the labeling
 * view (2-D sample on a scatter of locally-labeled points, one button per
 * class), and the rewards view (client-side accuracy preview, claim, payout
 * table). Polls the gateway once a second.
 */

import { ApiError, JobDetail, JobSummary, NextSample, Rewards } from "./api";
import { bytesToHex } from "./encoding";
import {
  WorkerContext,
  claimRewards,
  joinJob,
  previewClaim,
  submitLabel,
} from "./flows";

const CLASS_COLORS = ["#2f6fb8", "#c8553d", "#3f9162", "#8656a8"];

export class ConsoleUI {
  private selectedJob: number | null = null;
  private banner = "";
  private lastPayout: string | null = null;
  private claimed = new Set<number>();

  constructor(
    private readonly rootEl: HTMLElement,
    private readonly ctx: WorkerContext,
  ) {}

  start(pollMs = 1000): void {
    void this.refresh();
    setInterval(() => void this.refresh(), pollMs);
  }

  private setBanner(text: string): void {
    this.banner = text;
  }

  async refresh(): Promise<void> {
    let jobs: JobSummary[];
    try {
      jobs = await this.ctx.client.listJobs();
      if (this.banner.startsWith("gateway offline")) this.banner = "";
    } catch {
      this.setBanner("gateway offline — retrying");
      this.renderShell(null, [], null, null);
      return;
    }
    if (jobs.length === 0) {
      this.renderShell(null, [], null, null);
      return;
    }
    if (this.selectedJob === null || !jobs.some((j) => j.job_id === this.selectedJob)) {
      this.selectedJob = jobs[0]!.job_id;
    }
    const detail = await this.ctx.client.jobDetail(this.selectedJob);
    let sample: NextSample | null = null;
    if (detail.phase === "labeling") {
      sample = await this.ctx.client.nextSample(this.selectedJob, this.ctx.sessionId);
    }
    const rewards =
      detail.phase === "evaluating" || detail.phase === "completed"
        ? await this.ctx.client.rewards(this.selectedJob)
        : null;
    this.renderShell(detail, jobs, sample, rewards);
  }

  // --------------------------------------------------------------- actions

  private async handleJoin(job: JobDetail): Promise<void> {
    try {
      await joinJob(this.ctx, job.job_id, job.zk_mode);
      this.setBanner(`joined job ${job.job_id}${job.zk_mode ? " anonymously" : ""}`);
    } catch (error) {
      this.setBanner(describe(error));
    }
    void this.refresh();
  }

  private async handleLabel(job: JobDetail, sample: NextSample, label: number): Promise<void> {
    try {
      await submitLabel(this.ctx, job.job_id, job.zk_mode, sample.sample_id, label);
      this.setBanner(`label ${label} submitted for sample ${sample.sample_id}`);
    } catch (error) {
      const reason = error instanceof ApiError ? error.reason : null;
      if (reason === "SampleClosed" || reason === "DuplicateVote") {
        this.setBanner("already counted — fetching the next sample");
      } else if (reason === "NullifierUsed") {
        this.setBanner("credential already spent for this submission");
      } else {
        this.setBanner(describe(error));
      }
    }
    void this.refresh();
  }

  private async handleClaim(job: JobDetail): Promise<void> {
    try {
      const { payoutAddress } = await claimRewards(this.ctx, job.job_id);
      this.lastPayout = bytesToHex(payoutAddress);
      this.claimed.add(job.job_id);
      this.setBanner("score claimed — payout lands at distribution");
    } catch (error) {
      this.setBanner(describe(error));
    }
    void this.refresh();
  }

  // -------------------------------------------------------------- rendering

  private renderShell(
    detail: JobDetail | null,
    jobs: JobSummary[],
    sample: NextSample | null,
    rewards: Rewards | null,
  ): void {
    this.rootEl.replaceChildren();
    if (this.banner) {
      this.rootEl.append(el("div", { class: "banner" }, this.banner));
    }
    const cards = el("div", { class: "cards" });
    if (jobs.length === 0) {
      cards.append(el("p", {}, "no jobs"));
    }
    for (const job of jobs) {
      const card = el(
        "div",
        { class: `card ${job.job_id === this.selectedJob ? "selected" : ""}` },
        el("h3", {}, `job ${job.job_id} ${job.zk_mode ? "(anonymous)" : ""}`),
        el("span", { class: `phase phase-${job.phase}` }, job.phase),
        el("p", {}, `round ${job.round} · ${job.samples_open} open samples · pool ${job.reward_pool}`),
      );
      card.addEventListener("click", () => {
        this.selectedJob = job.job_id;
        void this.refresh();
      });
      cards.append(card);
    }
    this.rootEl.append(cards);
    if (!detail) return;

    const keyring = this.ctx.keyrings.get(detail.job_id);
    const joined = detail.zk_mode ? Boolean(keyring?.joined) : undefined;
    if (detail.phase === "labeling" || detail.phase === "recruiting") {
      this.rootEl.append(this.labelView(detail, sample, joined));
    }
    if (detail.phase === "evaluating" || detail.phase === "completed") {
      this.rootEl.append(this.rewardsView(detail, rewards));
    }
  }

  private labelView(job: JobDetail, sample: NextSample | null, joined?: boolean): HTMLElement {
    const view = el("div", { class: "panel" }, el("h2", {}, "label samples"));
    if (joined === false || joined === undefined) {
      const button = el("button", {}, job.zk_mode ? "join anonymously" : "join job");
      button.addEventListener("click", () => void this.handleJoin(job));
      view.append(button);
      if (joined === undefined && !job.zk_mode) {
        view.append(el("p", { class: "hint" }, "plain job: join once, then vote"));
      }
      if (job.zk_mode) {
        view.append(
          el("p", { class: "hint" }, "a fresh secret chain stays in this tab; only its commitment is sent"),
        );
      }
    }
    if (!sample) {
      view.append(el("p", {}, "no open sample right now"));
      return view;
    }
    view.append(
      el("p", {}, `sample ${sample.sample_id} · ${sample.votes_so_far} votes so far`),
      this.scatter(job, sample),
    );
    const buttons = el("div", { class: "classes" });
    for (let cls = 0; cls < job.num_classes; cls++) {
      const button = el("button", { style: `border-color:${CLASS_COLORS[cls % 4]}` }, `class ${cls}`);
      button.addEventListener("click", () => void this.handleLabel(job, sample, cls));
      buttons.append(button);
    }
    view.append(buttons);
    return view;
  }

  private scatter(job: JobDetail, sample: NextSample): HTMLElement {
    const canvas = el("canvas", { width: "320", height: "240" }) as HTMLCanvasElement;
    const ctx2d = canvas.getContext("2d");
    if (!ctx2d || sample.feature_vector.length < 2) return canvas;
    const keyring = this.ctx.keyrings.get(job.job_id);
    const history = keyring ? keyring.labels() : [];
    const points: Array<{ x: number; y: number; cls: number | null }> = history.map((h, i) => ({
      x: 0,
      y: 0,
      cls: h.label,
    }));
    // the console only knows coordinates for the current sample; past points
    // are drawn from a local cache keyed by sample id
    const cache = this.coordCache;
    for (let i = 0; i < history.length; i++) {
      const c = cache.get(history[i]!.sampleId);
      if (c) {
        points[i]!.x = c[0];
        points[i]!.y = c[1];
      }
    }
    cache.set(sample.sample_id, [sample.feature_vector[0]!, sample.feature_vector[1]!]);
    const all = points.concat([{ x: sample.feature_vector[0]!, y: sample.feature_vector[1]!, cls: null }]);
    const xs = all.map((p) => p.x);
    const ys = all.map((p) => p.y);
    const pad = 1.0;
    const [minX, maxX] = [Math.min(...xs) - pad, Math.max(...xs) + pad];
    const [minY, maxY] = [Math.min(...ys) - pad, Math.max(...ys) + pad];
    const sx = (x: number) => ((x - minX) / (maxX - minX)) * 300 + 10;
    const sy = (y: number) => 230 - ((y - minY) / (maxY - minY)) * 220;
    ctx2d.fillStyle = "#f7f7f4";
    ctx2d.fillRect(0, 0, 320, 240);
    for (const p of points) {
      if (!Number.isFinite(p.x)) continue;
      ctx2d.fillStyle = CLASS_COLORS[(p.cls ?? 0) % 4]!;
      ctx2d.beginPath();
      ctx2d.arc(sx(p.x), sy(p.y), 4, 0, Math.PI * 2);
      ctx2d.fill();
    }
    ctx2d.strokeStyle = "#111";
    ctx2d.lineWidth = 2;
    ctx2d.beginPath();
    ctx2d.arc(sx(sample.feature_vector[0]!), sy(sample.feature_vector[1]!), 7, 0, Math.PI * 2);
    ctx2d.stroke();
    return canvas;
  }

  private coordCache = new Map<number, [number, number]>();

  private rewardsView(job: JobDetail, rewards: Rewards | null): HTMLElement {
    const view = el("div", { class: "panel" }, el("h2", {}, "rewards"));
    if (!rewards || !rewards.truth_posted) {
      view.append(el("p", {}, "evaluation pending"));
      return view;
    }
    if (job.zk_mode && !this.claimed.has(job.job_id) && !job.distributed) {
      void previewClaim(this.ctx, job.job_id).then((preview) => {
        if (preview) {
          const line = this.rootEl.querySelector("#claim-preview");
          if (line) line.textContent =
            `your claimable accuracy: ${preview.correct}/${preview.total} (${Math.round(preview.accuracy * 100)}%)`;
        }
      });
      view.append(el("p", { id: "claim-preview" }, "computing claimable accuracy…"));
      const button = el("button", {}, "claim score (anonymous proof)");
      button.addEventListener("click", () => void this.handleClaim(job));
      view.append(button);
    }
    if (this.lastPayout) {
      view.append(el("p", { class: "hint" }, `payout address ${this.lastPayout.slice(0, 16)}…`));
    }
    const table = el("table", {}, el("tr", {}, el("th", {}, "address"), el("th", {}, "amount")));
    for (const payout of rewards.payouts) {
      table.append(
        el("tr", {}, el("td", {}, `${payout.address.slice(0, 16)}…`), el("td", {}, String(payout.amount))),
      );
    }
    view.append(
      rewards.payouts.length ? table : el("p", {}, "no payouts yet — claim window open"),
      el("p", {}, `refund to requester: ${rewards.refund}`),
    );
    return view;
  }
}

function el(tag: string, attrs: Record<string, string> = {}, ...children: Array<HTMLElement | string>): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `rejected: ${error.reason ?? error.message}`;
  return error instanceof Error ? error.message : String(error);
}
