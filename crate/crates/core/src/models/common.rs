//! Shared declarations and processes: alphabet, channels, globals, macros,
//! servers, user, preloading and the composed system.

/// Common part of every scenario, as written in the reference listing.
pub const COMMON: &str = r#"
#import "PAT.Lib.Set";
#import "PAT.Lib.SetMine";

//UML activities' objects and certificate's fields
enum {HelloClient, HelloServer, ClientFinished, ServerFinished, 
      Data, Warning, Webpage, Continue, Abort, StoreCertificate, 
      Pk, HSTS, No_HSTS, S, I, SignCA, SignS, SignI, expi, 
      noexpi, revo, norevo};
		
channel ui 0;
channel network 0;

//UML datastores, certificate, and typed/clicked url
var<Set> dynamicHSTSList;
var<Set> preloadedHSTSList;
var<SetArray> ServerCert;
var cert[3];
var extendedcert[6]; 
var typed_url: {S..I}=S;

//UML decision points
#define CertificateIsValid cert[0]==typed_url && 
                           cert[2]==SignCA && 
                           extendedcert[4]==noexpi;

#define CertificateIsValidNR cert[0]==typed_url && 
                             cert[2]==SignCA && 
                             extendedcert[4]==noexpi && 
                             extendedcert[5]==norevo; 
                             //This used by Safari
#define URLhasHSTSpolicy dynamicHSTSList.Contains(typed_url) || 
                         preloadedHSTSList.Contains(typed_url);
#define CertificateIsStored ServerCert.Contains(extendedcert);

//Variables to keep track of some session's event
var intruder_server=false;
var user_warned=false;
var finishTLS=false;
var preload=false;

//Intruder process chooses which server plays session by session//
Intruder()= ServerI() [] ServerH();

//-----Intruder server process-----//
ServerI() = []header:{HSTS, No_HSTS}@ []url:{S,I}@
            []sk:{SignI,SignCA}@
            Init_TLS ->
            network?urlx.HelloClient ->
            //Intruder cannot sign certificate on behalf of CA
            ifa (url==S && sk==SignCA) {
               network!HelloServer.url.Pk.SignI -> Skip}
            else {network!HelloServer.url.Pk.sk -> Skip};
            Finish_TLS ->
            network?m  ->
            ifa (m==ClientFinished) {
               INTRUDER_IN{intruder_server=true} ->
               network!ServerFinished.header.Data ->Skip
            };					
            Intruder();

//-----Honest server process-----//
ServerH() = []header:{HSTS, No_HSTS}@  []sk:{SignS,SignCA}@
            Init_TLS ->
            network?urlx.HelloClient ->
            network!HelloServer.S.Pk.sk ->
            Finish_TLS ->
            network?m ->
            ifa (m==ClientFinished) {
               network!ServerFinished.header.Data ->Skip};
            Intruder();

//-----User process-----//
User() =    ui?webpage ->
            case {
            //The user can type or click on either honest's or 
            //intruder's url.
            webpage == Webpage: ui!S{typed_url=S} -> User() [] 
                                ui!I{typed_url=I} -> User()
            webpage == Warning: ui!StoreCertificate -> User()[]
                                ui!Continue -> User() []
                                ui!Abort -> User()
            default: User()};

//------Model process-----//
Model = Preloading() [] Begin();
Preloading = PreloadHSTSpolicy->{preloadedHSTSList.Add(S); 
                                 preload=true} -> Begin;
Begin = Intruder() ||| User() ||| Browser();

//User who wants to visit the honest server
#define UserwantS typed_url==S;
//Successful MITM attack: User wants to visit the honest server,
//but browser completed with the intruder
#define AuthFail intruder_server && UserwantS;
#define User_warned user_warned;
#define CompleteTLS finishTLS;
#define Preload preload;

///---------Properties--------///
#assert Model deadlockfree; 
//Property 1
#assert Model |=[] ((CompleteTLS && !User_warned) -> 
                    CertificateIsValid);

//Property 2
#assert Model |=[]((CertificateIsStored && UserwantS && 
                   ui.Data && !AuthFail)->
                   X([](UserwantS -> !AuthFail)));

//Property 3
#assert Model |=[]((CertificateIsValid && 
                   network.ServerFinished.HSTS.Data && UserwantS)->
                   X([](UserwantS -> !AuthFail)));

//Property 4
#assert Model |=[] (Preload-> (UserwantS -> !AuthFail));


//Property 5
#assert Model |=[]((CompleteTLS && !CertificateIsValid && 
                   UserwantS)->
                  X([]((CompleteTLS && CertificateIsValid && 
                        UserwantS)-> 
                       User_warned)));
"#;
