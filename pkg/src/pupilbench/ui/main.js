var p=class extends Error{},d=class extends Error{};function z(t){return`/api/image/${encodeURIComponent(t)}`}async function w(){let t=await fetch("/api/images");if(!t.ok)throw new d(`image listing failed: ${t.status}`);return await t.json()}async function T(t){let n=await fetch(`/api/annotation/${encodeURIComponent(t)}`);if(n.status===404)return null;if(!n.ok)throw new d(`annotation fetch failed: ${n.status}`);return await n.json()}async function k(t,n,e,o,i="annotator-ui"){let s=await fetch(`/api/annotation/${encodeURIComponent(t)}`,{method:"PUT",headers:{"Content-Type":"application/json"},body:JSON.stringify({cx:n,cy:e,r:o,annotator:i,timestamp:Math.floor(Date.now()/1e3)})});if(s.status===422){let f=await s.json().catch(()=>({error:"invalid annotation"}));throw new p(f.error??"invalid annotation")}if(!s.ok)throw new d(`annotation save failed: ${s.status}`);return await s.json()}function W(t){return{imageId:t,cx:null,cy:null,r:null,dirty:!1}}function C(t,n,e,o){return{draft:{imageId:t,cx:n,cy:e,r:o,dirty:!1},dragging:!1,history:[]}}function L(t){return{draft:W(t),dragging:!1,history:[]}}function _(t,n,e){return t.x>=0&&t.x<n&&t.y>=0&&t.y<e}function X(t,n,e,o){return _(n,e,o)?{draft:{...t.draft,cx:n.x,cy:n.y,r:t.draft.r,dirty:!0},dragging:!0,history:[...t.history,"set-center"]}:t}function v(t,n){if(!t.dragging||t.draft.cx===null||t.draft.cy===null)return t;let e=Math.hypot(n.x-t.draft.cx,n.y-t.draft.cy);return{...t,draft:{...t.draft,r:e>0?e:t.draft.r}}}function Y(t,n){if(!t.dragging)return t;let e=v(t,n),o=e.draft.cx!==null&&Math.hypot(n.x-e.draft.cx,n.y-e.draft.cy)>.5;return{...e,dragging:!1,history:o?[...e.history,"set-radius"]:e.history}}function I(t){let n=[...t.history],e=n.pop();return e===void 0?t:e==="set-radius"?{...t,draft:{...t.draft,r:null},history:n}:{...t,draft:{...t.draft,cx:null,cy:null,dirty:t.draft.r!==null},history:n}}function E(t){return t.cx!==null&&t.cy!==null&&t.r!==null&&t.r>0}function $(t){return t.filter(n=>n.annotated).length}function H(t,n){return n===null?-1:t.findIndex(e=>e.id===n)}function O(t,n,e){if(t.length===0)return null;let o=H(t,n);if(o<0)return t[0].id;let i=Math.min(Math.max(o+e,0),t.length-1);return t[i].id}function V(t,n){if(t.length===0)return null;let e=Math.max(H(t,n),0);for(let o=1;o<=t.length;o++){let i=t[(e+o)%t.length];if(!i.annotated)return i.id}return null}function h(){return{zoom:1,panX:0,panY:0}}function g(t,n,e){return{x:n/t.zoom+t.panX,y:e/t.zoom+t.panY}}function D(t,n,e){return{x:(n-t.panX)*t.zoom,y:(e-t.panY)*t.zoom}}function M(t,n,e,o){let i=A(t.zoom*n,1,8);if(i===t.zoom)return t;let s=g(t,e,o);return{zoom:i,panX:s.x-e/i,panY:s.y-o/i}}function y(t,n,e,o,i){let s=o/t.zoom,f=i/t.zoom,N=s>=n?(n-s)/2:A(t.panX,0,n-s),Z=f>=e?(e-f)/2:A(t.panY,0,e-f);return{...t,panX:N,panY:Z}}function A(t,n,e){return Math.min(Math.max(t,n),e)}var l=t=>document.getElementById(t),r={entries:[],currentId:null,image:null,state:null,viewport:h(),panning:!1,lastPointer:null},a=document.getElementById("canvas"),u=a.getContext("2d");function c(){if(u.fillStyle="#181a1f",u.fillRect(0,0,a.width,a.height),!r.image)return;let t=r.viewport;u.imageSmoothingEnabled=t.zoom<3,u.drawImage(r.image,t.panX,t.panY,a.width/t.zoom,a.height/t.zoom,0,0,a.width,a.height);let n=r.state?.draft;if(n&&n.cx!==null&&n.cy!==null){let e=D(t,n.cx,n.cy);u.strokeStyle="#ffb447",u.lineWidth=1.5,u.beginPath(),u.moveTo(e.x-10,e.y),u.lineTo(e.x+10,e.y),u.moveTo(e.x,e.y-10),u.lineTo(e.x,e.y+10),u.stroke(),n.r!==null&&n.r>0&&(u.beginPath(),u.arc(e.x,e.y,n.r*t.zoom,0,2*Math.PI),u.stroke())}F()}function F(){let t=r.state?.draft,n=[`zoom ${r.viewport.zoom.toFixed(1)}x`];t?.cx!==null&&t?.cx!==void 0&&n.push(`center (${t.cx.toFixed(1)}, ${t.cy.toFixed(1)})`),t?.r&&n.push(`r ${t.r.toFixed(1)} px`),t?.dirty&&n.push("unsaved"),l("hud").textContent=n.join("  \xB7  ");let e=l("save");e.disabled=!(t&&E(t))}function P(){let t=l("gallery");if(t.innerHTML="",r.entries.length===0){t.innerHTML='<p class="empty">No images found in the served directory.</p>';return}for(let n of r.entries){let e=document.createElement("button");if(e.className="entry"+(n.id===r.currentId?" active":""),e.textContent=n.id,n.annotated){let o=document.createElement("span");o.className="badge",o.textContent="\u2713",e.appendChild(o)}e.addEventListener("click",()=>void x(n.id)),t.appendChild(e)}l("progress").textContent=`${$(r.entries)} / ${r.entries.length} annotated`}function m(t,n=!1){let e=l("banner");if(!t){e.hidden=!0;return}if(e.hidden=!1,e.innerHTML="",e.append(t),n){let o=document.createElement("button");o.textContent="Retry",o.addEventListener("click",()=>void B()),e.append(" ",o)}}async function B(){try{r.entries=await w(),m(null)}catch{m("Cannot reach the annotation server.",!0);return}P(),r.currentId===null&&r.entries.length>0&&await x(r.entries[0].id)}async function x(t){r.currentId=t;let n=new Image;n.src=z(t);try{await n.decode()}catch{m(`Cannot load image ${t}.`,!0);return}r.image=n,r.viewport=h(),S();let e=null;try{e=await T(t)}catch{}r.state=e?C(t,e.cx,e.cy,e.r):L(t),P(),c()}async function j(){if(!r.state||!r.currentId)return;let t=r.state.draft;if(!E(t))return;try{await k(r.currentId,t.cx,t.cy,t.r)}catch(e){e instanceof p?m(`Rejected: ${e.message}`):(e instanceof d||e instanceof TypeError)&&m("Save failed: server unreachable. Your draft is kept.",!0);return}m(null),r.state={...r.state,draft:{...t,dirty:!1}},r.entries=await w().catch(()=>r.entries),P();let n=V(r.entries,r.currentId);n!==null?await x(n):c()}function b(t){let n=a.getBoundingClientRect();return{x:t.clientX-n.left,y:t.clientY-n.top}}a.addEventListener("pointerdown",t=>{if(!r.image||!r.state)return;let n=b(t);if(t.button===1||t.shiftKey){r.panning=!0,r.lastPointer=n,t.preventDefault();return}let e=g(r.viewport,n.x,n.y);r.state=X(r.state,e,r.image.naturalWidth,r.image.naturalHeight),a.setPointerCapture(t.pointerId),c()});a.addEventListener("pointermove",t=>{if(!r.image||!r.state)return;let n=b(t);if(r.panning&&r.lastPointer){let i=G(n.x-r.lastPointer.x,n.y-r.lastPointer.y);r.lastPointer=n,i&&c();return}let e=g(r.viewport,n.x,n.y),o=v(r.state,e);o!==r.state&&(r.state=o,c())});a.addEventListener("pointerup",t=>{if(r.panning){r.panning=!1,r.lastPointer=null;return}if(!r.state)return;let n=b(t);r.state=Y(r.state,g(r.viewport,n.x,n.y)),c()});a.addEventListener("wheel",t=>{if(!r.image)return;t.preventDefault();let n=b(t),e=t.deltaY<0?1.25:.8;r.viewport=y(M(r.viewport,e,n.x,n.y),r.image.naturalWidth,r.image.naturalHeight,a.width,a.height),c()});function G(t,n){if(!r.image)return!1;let e=r.viewport;return r.viewport=y({...e,panX:e.panX-t/e.zoom,panY:e.panY-n/e.zoom},r.image.naturalWidth,r.image.naturalHeight,a.width,a.height),r.viewport.panX!==e.panX||r.viewport.panY!==e.panY}document.addEventListener("keydown",t=>{if(!(t.target instanceof HTMLInputElement||t.target instanceof HTMLTextAreaElement))switch(t.key){case"ArrowLeft":t.preventDefault(),U(-1);break;case"ArrowRight":t.preventDefault(),U(1);break;case"Enter":t.preventDefault(),j();break;case"u":case"z":r.state&&(r.state=I(r.state),c());break;case"+":case"=":R(1.25);break;case"-":R(.8);break;case"0":r.viewport=h(),c();break}});async function U(t){let n=O(r.entries,r.currentId,t);n!==null&&n!==r.currentId&&await x(n)}function R(t){r.image&&(r.viewport=y(M(r.viewport,t,a.width/2,a.height/2),r.image.naturalWidth,r.image.naturalHeight,a.width,a.height),c())}l("save").addEventListener("click",()=>void j());l("undo").addEventListener("click",()=>{r.state&&(r.state=I(r.state),c())});function S(){let t=l("stage");a.width=t.clientWidth,a.height=t.clientHeight}window.addEventListener("resize",()=>{S(),c()});S();B();
//# sourceMappingURL=main.js.map
