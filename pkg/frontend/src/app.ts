// Application wiring: one ViewState, one API client, and panels that all
// re-render from the latest responses. Interactive mode exposes the
// filter controls; kiosk mode (?kiosk=1) renders the same analytics with
// zero interactive controls and refreshes itself on a timer.

import { ApiClient } from "./api.js";
import { API_BASE } from "./config.js";
import { EventDialog } from "./dialog.js";
import { MapPane } from "./map.js";
import { Sidebar } from "./sidebar.js";
import { eventsQuery, initialState, termsQuery, ViewState } from "./state.js";
import { TimeRange } from "./timerange.js";
import type { Bounds, Tab } from "./state.js";
import { CATEGORIES } from "./types.js";
import { WordCloud } from "./wordcloud.js";

export class App {
    readonly state: ViewState;
    readonly api: ApiClient;
    readonly sidebar: Sidebar;
    readonly map: MapPane;
    readonly cloud: WordCloud;
    readonly dialog: EventDialog | null = null;
    readonly timeRange: TimeRange | null = null;
    private staleBadge: HTMLElement;
    private noticeBox: HTMLElement;
    private refreshTimer: number | undefined;

    constructor(
        root: HTMLElement,
        search: string = typeof location !== "undefined" ? location.search : "",
        api?: ApiClient,
    ) {
        this.state = initialState(search);
        this.api = api ?? new ApiClient(API_BASE);
        const interactive = !this.state.kiosk;

        root.classList.add("app");
        if (this.state.kiosk) root.classList.add("kiosk");

        this.sidebar = new Sidebar(
            root,
            {
                onSelectTab: (tab) => void this.selectTab(tab),
                onSelectEvent: (id) => void this.openEvent(id),
                onRetry: () => void this.refreshAll(),
            },
            interactive,
        );

        const main = document.createElement("main");
        main.className = "main-pane";
        root.appendChild(main);

        const mapBox = document.createElement("div");
        mapBox.className = "map-box";
        main.appendChild(mapBox);

        this.map = new MapPane(
            mapBox,
            this.state.viewport,
            {
                onViewportChange: (bounds) => void this.viewportChanged(bounds),
                onSelectEvent: (id) => void this.openEvent(id),
            },
            interactive,
        );

        if (interactive) {
            mapBox.appendChild(this.zoomControls());
        }

        this.staleBadge = document.createElement("div");
        this.staleBadge.className = "stale-badge hidden";
        this.staleBadge.dataset.testid = "stale-badge";
        this.staleBadge.textContent = "stale data — API unreachable";
        mapBox.appendChild(this.staleBadge);

        this.noticeBox = document.createElement("div");
        this.noticeBox.className = "notice hidden";
        main.appendChild(this.noticeBox);

        this.cloud = new WordCloud(main, (term) => void this.keywordPicked(term), interactive);

        if (interactive) {
            const controls = this.buildControls();
            root.appendChild(controls);
            this.timeRange = new TimeRange(controls, (range) => {
                this.state.since = range.since;
                this.state.until = range.until;
                void this.refreshAll();
            });
        }

        if (interactive) {
            this.dialog = new EventDialog(
                root,
                this.api,
                (id) => void this.openEvent(id),
                (message) => this.notice(message),
            );
        }

        this.sidebar.setActiveTab(this.state.tab);
    }

    start(): void {
        void this.refreshAll();
        if (this.state.refreshSeconds > 0) {
            this.refreshTimer = setInterval(
                () => void this.refreshAll(),
                this.state.refreshSeconds * 1000,
            ) as unknown as number;
        }
    }

    stop(): void {
        if (this.refreshTimer !== undefined) clearInterval(this.refreshTimer);
    }

    private zoomControls(): HTMLElement {
        const box = document.createElement("div");
        box.className = "zoom-controls";
        const zoomIn = document.createElement("button");
        zoomIn.textContent = "+";
        zoomIn.addEventListener("click", () => this.map.zoom(0.5));
        const zoomOut = document.createElement("button");
        zoomOut.textContent = "−";
        zoomOut.addEventListener("click", () => this.map.zoom(2.0));
        box.append(zoomIn, zoomOut);
        return box;
    }

    private buildControls(): HTMLElement {
        const panel = document.createElement("div");
        panel.className = "controls";
        panel.dataset.testid = "controls";

        const categoryCaption = document.createElement("div");
        categoryCaption.className = "control-caption";
        categoryCaption.textContent = "category";
        const select = document.createElement("select");
        select.dataset.testid = "category-select";
        const anyOption = document.createElement("option");
        anyOption.value = "";
        anyOption.textContent = "all categories";
        select.appendChild(anyOption);
        for (const category of CATEGORIES) {
            const option = document.createElement("option");
            option.value = category;
            option.textContent = category;
            select.appendChild(option);
        }
        select.addEventListener("change", () => {
            this.state.category = select.value || null;
            void this.refreshAll();
        });

        const keywordCaption = document.createElement("div");
        keywordCaption.className = "control-caption";
        keywordCaption.textContent = "keyword";
        const keyword = document.createElement("input");
        keyword.type = "search";
        keyword.placeholder = "keyword…";
        keyword.dataset.testid = "keyword-input";
        keyword.addEventListener("change", () => {
            this.state.keyword = keyword.value.trim().toLowerCase() || null;
            void this.refreshAll();
        });
        this.keywordInput = keyword;

        const toggleLabel = document.createElement("label");
        toggleLabel.className = "geotag-toggle";
        const toggle = document.createElement("input");
        toggle.type = "checkbox";
        toggle.checked = this.state.geotagged;
        toggle.dataset.testid = "geotag-toggle";
        toggle.addEventListener("change", () => {
            this.state.geotagged = toggle.checked;
            void this.refreshAll();
        });
        toggleLabel.append(toggle, document.createTextNode(" geotagged events (map filters)"));

        panel.append(categoryCaption, select, keywordCaption, keyword, toggleLabel);
        return panel;
    }

    private keywordInput: HTMLInputElement | null = null;

    private notice(message: string): void {
        this.noticeBox.textContent = message;
        this.noticeBox.classList.remove("hidden");
        setTimeout(() => this.noticeBox.classList.add("hidden"), 4000);
    }

    async viewportChanged(bounds: Bounds): Promise<void> {
        this.state.viewport = bounds;
        // with the geotag toggle off the bbox is not part of the query,
        // so panning is a purely local affair
        if (this.state.geotagged) {
            await this.refreshAll();
        }
    }

    async selectTab(tab: Tab): Promise<void> {
        this.state.tab = tab;
        this.sidebar.setActiveTab(tab);
        await this.refreshAll();
    }

    async keywordPicked(term: string): Promise<void> {
        this.state.keyword = term;
        if (this.keywordInput) this.keywordInput.value = term;
        await this.refreshAll();
    }

    async openEvent(id: string): Promise<void> {
        if (this.dialog === null) return;
        this.state.selectedEvent = id;
        await this.dialog.open(id);
    }

    async refreshAll(): Promise<void> {
        try {
            const [events, terms] = await Promise.all([
                this.api.events(eventsQuery(this.state)),
                this.api.terms(termsQuery(this.state)),
            ]);
            if (this.state.tab === "agencies" && !this.state.kiosk) {
                this.sidebar.renderAgencies(await this.api.agencies());
            } else {
                this.sidebar.renderEvents(events);
            }
            this.map.render(events);
            this.cloud.render(terms);
            for (const event of events) {
                this.timeRange?.observe(event.first_seen, event.last_seen);
            }
            this.staleBadge.classList.add("hidden");
            this.sidebar.clearError();
        } catch (error) {
            if ((error as DOMException).name === "AbortError") return;
            // keep the last rendered snapshot on screen
            if (this.state.kiosk) {
                this.staleBadge.classList.remove("hidden");
            } else {
                this.sidebar.showError("could not reach the analytics API");
            }
        }
    }
}

export function mount(): App {
    const root = document.getElementById("app");
    if (!root) throw new Error("missing #app container");
    const app = new App(root);
    app.start();
    return app;
}
