import { ServiceClient } from "./api.js";
import { ConsoleApp } from "./app.js";
import { mount } from "./view.js";

const app = new ConsoleApp(new ServiceClient(""));
const render = mount(document.getElementById("app")!, app);
app.onChange = render;
render(app.state);

// staleness is wall-clock driven, so repaint even between frames
setInterval(() => render(app.state), 250);

function start() {
  app.connect().catch((err) => {
    console.error("connect failed, retrying:", err);
    setTimeout(start, 2000);
  });
}
start();
